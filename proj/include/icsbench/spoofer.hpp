#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "icsbench/series_frame.hpp"

namespace icsbench::spoofer {

/// Inclusive run of anomalous steps.
struct AttackInterval {
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const AttackInterval&) const = default;
};

enum class Technique { kConstant, kGaussian, kGaussianV2, kReplay };
enum class ConstantStat { kMean, kMedian };
enum class ActuatorMode { kUnknownState, kConstant };

std::string technique_name(Technique t);
Technique technique_from_name(const std::string& name);

/// One attack configuration. `columns` empty means every column of the
/// target frame is spoofed. `replay_offset` unset selects the aligned
/// window rule (interval start mod available positions).
struct SpoofPlan {
  std::string id;
  Technique technique = Technique::kConstant;
  std::vector<std::string> columns;
  ConstantStat stat = ConstantStat::kMean;
  double sigma_scale = 1.0;
  std::optional<std::size_t> replay_offset;
  ActuatorMode actuator_mode = ActuatorMode::kUnknownState;
  std::uint64_t seed = 0;
};

/// Maximal runs of consecutive 1s in a 0/1 label vector, sorted, disjoint.
std::vector<AttackInterval> find_intervals(const std::vector<std::uint8_t>& labels);

struct ApplyResult {
  SeriesFrame frame;
  std::vector<std::string> warnings;
};

/// Rewrites the plan's columns inside the labeled intervals of `test`;
/// every other cell and the label vector are carried over bit-identically.
/// `tuning` holds eavesdropped-window statistics; `eavesdropped` supplies
/// replay source material and must be benign.
ApplyResult apply(const SpoofPlan& plan, const SeriesFrame& test,
                  const std::map<std::string, ColumnStats>& tuning,
                  const SeriesFrame& eavesdropped);

}  // namespace icsbench::spoofer
