#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "icsbench/metrics.hpp"
#include "icsbench/series_frame.hpp"
#include "icsbench/svm.hpp"

namespace icsbench::tracesvm {

enum class TraceMode { kSpatioTemporal, kSpatialOnly, kTemporalUnivariate, kUnivariate };

std::string trace_mode_name(TraceMode mode);
TraceMode trace_mode_from_name(const std::string& name);

/// Feature layout for trace classification: sensor readings at step t
/// paired with the same sensors `delay` steps later. The ablation modes
/// drop the delayed half, the spatial spread, or both.
struct TraceFeatureSpec {
  std::size_t delay = 100;
  TraceMode mode = TraceMode::kSpatioTemporal;
  std::vector<std::string> sensors;  // univariate modes use the first entry
};

struct TraceSet {
  Eigen::MatrixXd features;          // one row per trace start step
  std::vector<std::uint8_t> labels;  // 1 when either endpoint is anomalous
  std::size_t delay = 0;
  std::size_t frame_rows = 0;
};

/// Row t covers steps t and t+delay (t <= rows-1-delay). Unlabeled frames
/// yield all-zero trace labels.
TraceSet build_traces(const SeriesFrame& frame, const TraceFeatureSpec& spec);

/// Keeps every stride-th trace; training-set thinning for solver cost.
TraceSet subsample(const TraceSet& traces, std::size_t stride);

/// Per-timestep alarms: both endpoints of every anomalous trace are marked.
AlarmSeries trace_alarms(const std::vector<std::uint8_t>& trace_verdicts, std::size_t delay,
                         std::size_t frame_rows);

}  // namespace icsbench::tracesvm
