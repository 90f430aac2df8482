#include "icsbench/metrics.hpp"

#include <cstdio>
#include <stdexcept>

namespace icsbench::metrics {

ConfusionCounts confusion(const std::vector<std::uint8_t>& alarms,
                          const std::vector<std::uint8_t>& labels,
                          const std::vector<std::uint8_t>& exclude) {
  if (alarms.size() != labels.size()) {
    throw std::invalid_argument("alarm/label length mismatch: " + std::to_string(alarms.size()) +
                                " vs " + std::to_string(labels.size()));
  }
  if (!exclude.empty() && exclude.size() != labels.size()) {
    throw std::invalid_argument("exclude mask length mismatch");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < alarms.size(); ++i) {
    if (!exclude.empty() && exclude[i]) {
      ++c.excluded;
      continue;
    }
    if (labels[i]) {
      alarms[i] ? ++c.tp : ++c.fn;
    } else {
      alarms[i] ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

ScoreSet scores(const ConfusionCounts& c) {
  if (c.total() == 0) throw std::invalid_argument("no evaluated steps");
  ScoreSet s;
  s.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  if (c.tp + c.fp > 0) s.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) s.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (c.tn + c.fp > 0) s.fpr = static_cast<double>(c.fp) / static_cast<double>(c.tn + c.fp);
  if (s.precision && s.recall && (*s.precision + *s.recall) > 0.0) {
    s.f1 = 2.0 * (*s.precision) * (*s.recall) / (*s.precision + *s.recall);
  }
  return s;
}

std::string score_to_string(const std::optional<double>& score, int precision) {
  if (!score) return "NaN";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", precision, *score);
  return buf;
}

}  // namespace icsbench::metrics
