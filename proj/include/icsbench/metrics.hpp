#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace icsbench {

/// Per-timestep 0/1 detector verdicts. The first `warmup` steps are
/// fill-in while the detector has not seen enough history; they carry
/// value 0 and are excluded from scoring.
struct AlarmSeries {
  std::vector<std::uint8_t> values;
  std::size_t warmup = 0;

  std::vector<std::uint8_t> exclude_mask() const {
    std::vector<std::uint8_t> mask(values.size(), 0);
    for (std::size_t i = 0; i < warmup && i < mask.size(); ++i) mask[i] = 1;
    return mask;
  }
};

namespace metrics {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;
  std::uint64_t excluded = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
};

/// Classification scores; a disengaged optional marks an undefined score
/// (zero denominator), rendered as NaN. Scores are never forced to 0 by
/// convention.
struct ScoreSet {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  std::optional<double> fpr;
};

/// Counts alarm/label agreement over steps not masked out by `exclude`.
/// Positive class is label 1.
ConfusionCounts confusion(const std::vector<std::uint8_t>& alarms,
                          const std::vector<std::uint8_t>& labels,
                          const std::vector<std::uint8_t>& exclude = {});

ScoreSet scores(const ConfusionCounts& counts);

/// Fixed-precision rendering; undefined scores become "NaN".
std::string score_to_string(const std::optional<double>& score, int precision = 6);

}  // namespace metrics
}  // namespace icsbench
