#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "icsbench/errors.hpp"

namespace icsbench {

enum class ColumnKind { kSensorContinuous, kActuatorDiscrete };

struct ColumnMeta {
  std::string name;
  ColumnKind kind = ColumnKind::kSensorContinuous;
};

/// Labeled multivariate time series. Rows are consecutive sampling periods
/// (implicit step index 0..rows-1, stride 1); columns are typed sensor or
/// actuator channels. Immutable after construction apart from full-frame
/// rebuilds; all operations return copies.
class SeriesFrame {
public:
  SeriesFrame() = default;

  /// Validating constructor; `values` is row-major rows x columns.
  static SeriesFrame create(std::vector<ColumnMeta> columns, std::vector<double> values,
                            std::optional<std::vector<std::uint8_t>> labels = std::nullopt);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return columns_.size(); }

  double at(std::size_t row, std::size_t col) const { return values_[row * columns_.size() + col]; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<ColumnMeta>& columns() const { return columns_; }
  const ColumnMeta& column(std::size_t i) const { return columns_[i]; }

  std::optional<std::size_t> find_column(std::string_view name) const;
  /// Index of a named column; throws ValidationError when absent.
  std::size_t column_index(std::string_view name) const;

  bool has_labels() const { return labels_.has_value(); }
  const std::vector<std::uint8_t>& labels() const;

  std::vector<double> column_values(std::size_t col) const;
  std::vector<double> column_values(std::string_view name) const;

  /// Rows [start, end); labels stay aligned.
  SeriesFrame slice(std::size_t start, std::size_t end) const;
  SeriesFrame select_columns(const std::vector<std::string>& names) const;

  /// Mutable access for builders that re-check invariants themselves
  /// (spoofer rewrites cells in a copy).
  double& cell(std::size_t row, std::size_t col) { return values_[row * columns_.size() + col]; }

private:
  std::vector<ColumnMeta> columns_;
  std::vector<double> values_;
  std::optional<std::vector<std::uint8_t>> labels_;
  std::size_t rows_ = 0;
};

/// Descriptive statistics of one column over a capture. std is the
/// population standard deviation. observed_alphabet is filled for
/// actuator columns only.
struct ColumnStats {
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;
  std::set<double> observed_alphabet;
};

/// Per-column (min, max) captured from training data for 0-1 scaling.
struct NormalizationMap {
  std::map<std::string, std::pair<double, double>> bounds;
};

struct CsvSchema {
  std::vector<ColumnMeta> columns;
  std::string label_column = "ATT_FLAG";
};

/// Reads a BATADAL-style CSV capture. Header names must cover the schema;
/// extra columns (e.g. wall-clock timestamps) are parsed and discarded.
/// The label column, when present, must hold only 0 or 1.
SeriesFrame load_csv(const std::string& path, const CsvSchema& schema);

/// Writes values with 17 significant digits so load(write(f)) round-trips
/// bit-exactly. Labels are appended as `label_column` when present.
void write_csv(const SeriesFrame& frame, const std::string& path,
               const std::string& label_column = "ATT_FLAG");

std::map<std::string, ColumnStats> compute_stats(const SeriesFrame& frame,
                                                 const std::vector<std::string>& columns);

/// All-column convenience overload.
std::map<std::string, ColumnStats> compute_stats(const SeriesFrame& frame);

/// Captures per-column (min, max) of every continuous column.
NormalizationMap fit_minmax(const SeriesFrame& frame);

/// x' = (x - min) / (max - min). Constant training columns map to 0.
/// Out-of-range values are not clipped; actuator columns pass through.
SeriesFrame normalize_minmax(const SeriesFrame& frame, const NormalizationMap& map);

/// Inverse of normalize_minmax for continuous columns.
SeriesFrame denormalize_minmax(const SeriesFrame& frame, const NormalizationMap& map);

}  // namespace icsbench
