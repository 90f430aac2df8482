#include "icsbench/tracesvm.hpp"

namespace icsbench::tracesvm {

std::string trace_mode_name(TraceMode mode) {
  switch (mode) {
    case TraceMode::kSpatioTemporal: return "spatiotemporal";
    case TraceMode::kSpatialOnly: return "spatial_only";
    case TraceMode::kTemporalUnivariate: return "temporal_univariate";
    case TraceMode::kUnivariate: return "univariate";
  }
  return "unknown";
}

TraceMode trace_mode_from_name(const std::string& name) {
  if (name == "spatiotemporal") return TraceMode::kSpatioTemporal;
  if (name == "spatial_only") return TraceMode::kSpatialOnly;
  if (name == "temporal_univariate") return TraceMode::kTemporalUnivariate;
  if (name == "univariate") return TraceMode::kUnivariate;
  throw ValidationError("unknown trace mode '" + name + "'");
}

TraceSet build_traces(const SeriesFrame& frame, const TraceFeatureSpec& spec) {
  if (spec.delay < 1) throw ValidationError("trace delay must be >= 1");
  if (spec.sensors.empty()) throw ValidationError("trace feature spec needs a sensor subset");
  if (frame.rows() < spec.delay + 2) {
    throw ValidationError("frame too short for the trace delay");
  }

  std::vector<std::size_t> cols;
  const bool univariate =
      spec.mode == TraceMode::kTemporalUnivariate || spec.mode == TraceMode::kUnivariate;
  if (univariate) {
    cols.push_back(frame.column_index(spec.sensors.front()));
  } else {
    for (const auto& name : spec.sensors) cols.push_back(frame.column_index(name));
  }

  const bool temporal =
      spec.mode == TraceMode::kSpatioTemporal || spec.mode == TraceMode::kTemporalUnivariate;
  const std::size_t dim = cols.size() * (temporal ? 2 : 1);
  const std::size_t count = frame.rows() - spec.delay;

  TraceSet out;
  out.delay = spec.delay;
  out.frame_rows = frame.rows();
  out.features.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
  out.labels.assign(count, 0);

  for (std::size_t t = 0; t < count; ++t) {
    Eigen::Index f = 0;
    for (std::size_t c : cols) {
      out.features(static_cast<Eigen::Index>(t), f++) = frame.at(t, c);
    }
    if (temporal) {
      for (std::size_t c : cols) {
        out.features(static_cast<Eigen::Index>(t), f++) = frame.at(t + spec.delay, c);
      }
    }
    if (frame.has_labels()) {
      out.labels[t] = (frame.labels()[t] || frame.labels()[t + spec.delay]) ? 1 : 0;
    }
  }
  return out;
}

TraceSet subsample(const TraceSet& traces, std::size_t stride) {
  if (stride <= 1) return traces;
  TraceSet out;
  out.delay = traces.delay;
  out.frame_rows = traces.frame_rows;
  const std::size_t count = (static_cast<std::size_t>(traces.features.rows()) + stride - 1) / stride;
  out.features.resize(static_cast<Eigen::Index>(count), traces.features.cols());
  out.labels.reserve(count);
  Eigen::Index row = 0;
  for (std::size_t t = 0; t < static_cast<std::size_t>(traces.features.rows()); t += stride) {
    out.features.row(row++) = traces.features.row(static_cast<Eigen::Index>(t));
    out.labels.push_back(traces.labels[t]);
  }
  return out;
}

AlarmSeries trace_alarms(const std::vector<std::uint8_t>& trace_verdicts, std::size_t delay,
                         std::size_t frame_rows) {
  AlarmSeries alarms;
  alarms.values.assign(frame_rows, 0);
  for (std::size_t t = 0; t < trace_verdicts.size(); ++t) {
    if (!trace_verdicts[t]) continue;
    alarms.values[t] = 1;
    if (t + delay < frame_rows) alarms.values[t + delay] = 1;
  }
  return alarms;
}

}  // namespace icsbench::tracesvm
