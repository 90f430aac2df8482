#include "icsbench/spoofer.hpp"

#include <algorithm>
#include <cmath>

#include "icsbench/rng.hpp"

namespace icsbench::spoofer {

std::string technique_name(Technique t) {
  switch (t) {
    case Technique::kConstant: return "constant";
    case Technique::kGaussian: return "gaussian";
    case Technique::kGaussianV2: return "gaussian_v2";
    case Technique::kReplay: return "replay";
  }
  return "unknown";
}

Technique technique_from_name(const std::string& name) {
  if (name == "constant") return Technique::kConstant;
  if (name == "gaussian") return Technique::kGaussian;
  if (name == "gaussian_v2") return Technique::kGaussianV2;
  if (name == "replay") return Technique::kReplay;
  throw ValidationError("unknown spoofing technique '" + name + "'");
}

std::vector<AttackInterval> find_intervals(const std::vector<std::uint8_t>& labels) {
  std::vector<AttackInterval> intervals;
  std::size_t i = 0;
  while (i < labels.size()) {
    if (labels[i] > 1) throw ValidationError("labels must be 0 or 1");
    if (labels[i] == 1) {
      std::size_t start = i;
      while (i + 1 < labels.size() && labels[i + 1] == 1) ++i;
      intervals.push_back({start, i});
    }
    ++i;
  }
  return intervals;
}

namespace {

/// Modal training value of an actuator alphabet: the most frequent value,
/// smallest on ties.
double modal_value(const std::vector<double>& column, const std::set<double>& alphabet) {
  double best = *alphabet.begin();
  std::size_t best_count = 0;
  for (double candidate : alphabet) {
    std::size_t count = 0;
    for (double v : column) {
      if (v == candidate) ++count;
    }
    if (count > best_count) {
      best = candidate;
      best_count = count;
    }
  }
  return best;
}

}  // namespace

ApplyResult apply(const SpoofPlan& plan, const SeriesFrame& test,
                  const std::map<std::string, ColumnStats>& tuning,
                  const SeriesFrame& eavesdropped) {
  if (!test.has_labels()) throw ValidationError("spoofing needs a labeled test frame");
  if (plan.sigma_scale <= 0.0 || plan.sigma_scale > 1.0) {
    throw ValidationError("sigma_scale must be in (0, 1]");
  }

  std::vector<std::string> columns = plan.columns;
  if (columns.empty()) {
    for (const auto& meta : test.columns()) columns.push_back(meta.name);
  }

  std::vector<std::size_t> column_idx;
  column_idx.reserve(columns.size());
  for (const auto& name : columns) {
    column_idx.push_back(test.column_index(name));
    if (tuning.find(name) == tuning.end()) {
      throw ValidationError("tuning statistics missing column '" + name + "'");
    }
  }

  const auto intervals = find_intervals(test.labels());

  ApplyResult result;
  if (plan.technique == Technique::kReplay) {
    if (eavesdropped.has_labels()) {
      for (std::uint8_t l : eavesdropped.labels()) {
        if (l != 0) throw ValidationError("replay source must contain no anomalies");
      }
    }
    std::size_t longest = 0;
    for (const auto& iv : intervals) longest = std::max(longest, iv.end - iv.start + 1);
    if (eavesdropped.rows() < longest) {
      throw ValidationError("eavesdropped frame shorter than the longest attack interval");
    }
    for (const auto& name : columns) eavesdropped.column_index(name);
  }

  SeriesFrame out = test;
  rng::GaussianStream stream(plan.seed);
  bool sigma_zero_warned = false;

  for (const auto& iv : intervals) {
    const std::size_t len = iv.end - iv.start + 1;
    std::size_t replay_start = 0;
    if (plan.technique == Technique::kReplay) {
      const std::size_t positions = eavesdropped.rows() - len + 1;
      if (plan.replay_offset) {
        replay_start = *plan.replay_offset;
        if (replay_start + len > eavesdropped.rows()) {
          throw ValidationError("replay offset leaves too little eavesdropped data");
        }
      } else {
        replay_start = iv.start % positions;
      }
    }

    for (std::size_t ci = 0; ci < columns.size(); ++ci) {
      const std::string& name = columns[ci];
      const std::size_t col = column_idx[ci];
      const ColumnStats& stats = tuning.at(name);
      const bool is_actuator = test.column(col).kind == ColumnKind::kActuatorDiscrete;

      switch (plan.technique) {
        case Technique::kConstant: {
          const double value = plan.stat == ConstantStat::kMean ? stats.mean : stats.median;
          for (std::size_t r = iv.start; r <= iv.end; ++r) out.cell(r, col) = value;
          break;
        }
        case Technique::kGaussian: {
          const double sigma = plan.sigma_scale * stats.std;
          if (sigma == 0.0 && !sigma_zero_warned) {
            result.warnings.push_back("degenerate gaussian draw (sigma 0) on column " + name);
            sigma_zero_warned = true;
          }
          for (std::size_t r = iv.start; r <= iv.end; ++r) {
            out.cell(r, col) = sigma == 0.0 ? stats.mean : stream.next(stats.mean, sigma);
          }
          break;
        }
        case Technique::kGaussianV2: {
          if (is_actuator) {
            if (stats.observed_alphabet.empty()) {
              throw ValidationError("actuator column '" + name + "' has no observed alphabet");
            }
            double value;
            if (plan.actuator_mode == ActuatorMode::kUnknownState) {
              value = *stats.observed_alphabet.rbegin() + 1.0;
            } else {
              if (eavesdropped.rows() == 0) {
                throw ValidationError("constant actuator mode needs an eavesdropped capture");
              }
              value = modal_value(eavesdropped.column_values(name), stats.observed_alphabet);
            }
            for (std::size_t r = iv.start; r <= iv.end; ++r) out.cell(r, col) = value;
          } else {
            const double sigma = plan.sigma_scale * stats.std;
            if (sigma == 0.0 && !sigma_zero_warned) {
              result.warnings.push_back("degenerate gaussian draw (sigma 0) on column " + name);
              sigma_zero_warned = true;
            }
            for (std::size_t r = iv.start; r <= iv.end; ++r) {
              out.cell(r, col) = sigma == 0.0 ? stats.mean : stream.next(stats.mean, sigma);
            }
          }
          break;
        }
        case Technique::kReplay: {
          const std::size_t src = eavesdropped.column_index(name);
          for (std::size_t r = iv.start; r <= iv.end; ++r) {
            out.cell(r, col) = eavesdropped.at(replay_start + (r - iv.start), src);
          }
          break;
        }
      }
    }
  }

  result.frame = std::move(out);
  return result;
}

}  // namespace icsbench::spoofer
