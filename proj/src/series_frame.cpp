#include "icsbench/series_frame.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace icsbench {

namespace {

std::string make_parse_message(const std::string& message, std::size_t row, const std::string& column) {
  std::ostringstream out;
  out << message;
  if (row > 0) out << " (row " << row;
  if (!column.empty()) out << (row > 0 ? ", column " : " (column ") << column;
  if (row > 0 || !column.empty()) out << ")";
  return out.str();
}

double parse_number(const std::string& cell, std::size_t row, const std::string& column) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end != begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || begin == end) {
    throw ParseError("non-numeric cell '" + cell + "'", row, column);
  }
  return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

}  // namespace

ParseError::ParseError(std::string message, std::size_t row, std::string column)
    : std::runtime_error(make_parse_message(message, row, column)), row_(row), column_(std::move(column)) {}

SeriesFrame SeriesFrame::create(std::vector<ColumnMeta> columns, std::vector<double> values,
                                std::optional<std::vector<std::uint8_t>> labels) {
  if (columns.empty()) throw ValidationError("frame needs at least one column");
  if (values.size() % columns.size() != 0) {
    throw ValidationError("value count is not a multiple of the column count");
  }
  for (std::size_t i = 0; i < columns.size(); ++i) {
    for (std::size_t j = i + 1; j < columns.size(); ++j) {
      if (columns[i].name == columns[j].name) {
        throw ValidationError("duplicate column name '" + columns[i].name + "'");
      }
    }
  }
  const std::size_t rows = values.size() / columns.size();
  if (labels) {
    if (labels->size() != rows) throw ValidationError("label vector length does not match row count");
    for (std::uint8_t v : *labels) {
      if (v > 1) throw ValidationError("labels must be 0 or 1");
    }
  }
  SeriesFrame frame;
  frame.columns_ = std::move(columns);
  frame.values_ = std::move(values);
  frame.labels_ = std::move(labels);
  frame.rows_ = rows;
  return frame;
}

std::optional<std::size_t> SeriesFrame::find_column(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t SeriesFrame::column_index(std::string_view name) const {
  auto idx = find_column(name);
  if (!idx) throw ValidationError("unknown column '" + std::string(name) + "'");
  return *idx;
}

const std::vector<std::uint8_t>& SeriesFrame::labels() const {
  if (!labels_) throw ValidationError("frame has no labels");
  return *labels_;
}

std::vector<double> SeriesFrame::column_values(std::size_t col) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = at(r, col);
  return out;
}

std::vector<double> SeriesFrame::column_values(std::string_view name) const {
  return column_values(column_index(name));
}

SeriesFrame SeriesFrame::slice(std::size_t start, std::size_t end) const {
  if (start >= end || end > rows_) {
    throw ValidationError("slice range [" + std::to_string(start) + ", " + std::to_string(end) +
                          ") out of bounds for " + std::to_string(rows_) + " rows");
  }
  std::vector<double> values(values_.begin() + static_cast<std::ptrdiff_t>(start * cols()),
                             values_.begin() + static_cast<std::ptrdiff_t>(end * cols()));
  std::optional<std::vector<std::uint8_t>> labels;
  if (labels_) {
    labels = std::vector<std::uint8_t>(labels_->begin() + static_cast<std::ptrdiff_t>(start),
                                       labels_->begin() + static_cast<std::ptrdiff_t>(end));
  }
  return create(columns_, std::move(values), std::move(labels));
}

SeriesFrame SeriesFrame::select_columns(const std::vector<std::string>& names) const {
  std::vector<std::size_t> indices;
  std::vector<ColumnMeta> metas;
  indices.reserve(names.size());
  for (const auto& name : names) {
    indices.push_back(column_index(name));
    metas.push_back(columns_[indices.back()]);
  }
  std::vector<double> values;
  values.reserve(rows_ * indices.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t idx : indices) values.push_back(at(r, idx));
  }
  return create(std::move(metas), std::move(values), labels_);
}

SeriesFrame load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file '" + path + "'");

  const auto header = split_csv_line(line);
  auto header_index = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      std::string h = header[i];
      while (!h.empty() && (h.back() == ' ' || h.back() == '\r')) h.pop_back();
      std::size_t b = 0;
      while (b < h.size() && h[b] == ' ') ++b;
      if (h.substr(b) == name) return i;
    }
    return std::nullopt;
  };

  std::vector<std::size_t> field_of_column(schema.columns.size());
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    auto idx = header_index(schema.columns[c].name);
    if (!idx) throw ParseError("missing column", 1, schema.columns[c].name);
    field_of_column[c] = *idx;
  }
  const auto label_field = header_index(schema.label_column);

  std::vector<double> values;
  std::vector<std::uint8_t> labels;
  std::size_t row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseError("ragged row: expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()),
                       row_number);
    }
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
      values.push_back(parse_number(fields[field_of_column[c]], row_number, schema.columns[c].name));
    }
    if (label_field) {
      const double v = parse_number(fields[*label_field], row_number, schema.label_column);
      if (v != 0.0 && v != 1.0) {
        throw ParseError("label outside {0,1}", row_number, schema.label_column);
      }
      labels.push_back(static_cast<std::uint8_t>(v));
    }
  }
  if (values.empty()) throw ParseError("no data rows in '" + path + "'");

  std::optional<std::vector<std::uint8_t>> opt_labels;
  if (label_field) opt_labels = std::move(labels);
  return SeriesFrame::create(schema.columns, std::move(values), std::move(opt_labels));
}

void write_csv(const SeriesFrame& frame, const std::string& path, const std::string& label_column) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  for (std::size_t c = 0; c < frame.cols(); ++c) {
    if (c) out << ',';
    out << frame.column(c).name;
  }
  if (frame.has_labels()) out << ',' << label_column;
  out << '\n';

  char buf[64];
  for (std::size_t r = 0; r < frame.rows(); ++r) {
    for (std::size_t c = 0; c < frame.cols(); ++c) {
      if (c) out << ',';
      std::snprintf(buf, sizeof buf, "%.17g", frame.at(r, c));
      out << buf;
    }
    if (frame.has_labels()) out << ',' << static_cast<int>(frame.labels()[r]);
    out << '\n';
  }
}

std::map<std::string, ColumnStats> compute_stats(const SeriesFrame& frame,
                                                 const std::vector<std::string>& columns) {
  if (frame.rows() == 0) throw ValidationError("cannot compute statistics of an empty frame");
  std::map<std::string, ColumnStats> out;
  for (const auto& name : columns) {
    const std::size_t idx = frame.column_index(name);
    auto v = frame.column_values(idx);
    ColumnStats s;
    double sum = 0.0;
    s.min = v[0];
    s.max = v[0];
    for (double x : v) {
      sum += x;
      s.min = std::min(s.min, x);
      s.max = std::max(s.max, x);
    }
    s.mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size()));
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    s.median = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    if (frame.column(idx).kind == ColumnKind::kActuatorDiscrete) {
      s.observed_alphabet.insert(v.begin(), v.end());
    }
    out.emplace(name, std::move(s));
  }
  return out;
}

std::map<std::string, ColumnStats> compute_stats(const SeriesFrame& frame) {
  std::vector<std::string> names;
  names.reserve(frame.cols());
  for (const auto& c : frame.columns()) names.push_back(c.name);
  return compute_stats(frame, names);
}

NormalizationMap fit_minmax(const SeriesFrame& frame) {
  NormalizationMap map;
  for (std::size_t c = 0; c < frame.cols(); ++c) {
    if (frame.column(c).kind != ColumnKind::kSensorContinuous) continue;
    double lo = frame.at(0, c);
    double hi = lo;
    for (std::size_t r = 1; r < frame.rows(); ++r) {
      lo = std::min(lo, frame.at(r, c));
      hi = std::max(hi, frame.at(r, c));
    }
    map.bounds.emplace(frame.column(c).name, std::make_pair(lo, hi));
  }
  return map;
}

SeriesFrame normalize_minmax(const SeriesFrame& frame, const NormalizationMap& map) {
  std::vector<double> values = frame.values();
  for (std::size_t c = 0; c < frame.cols(); ++c) {
    if (frame.column(c).kind != ColumnKind::kSensorContinuous) continue;
    auto it = map.bounds.find(frame.column(c).name);
    if (it == map.bounds.end()) {
      throw ValidationError("normalization map is missing column '" + frame.column(c).name + "'");
    }
    const auto [lo, hi] = it->second;
    const double span = hi - lo;
    for (std::size_t r = 0; r < frame.rows(); ++r) {
      double& x = values[r * frame.cols() + c];
      x = (span == 0.0) ? 0.0 : (x - lo) / span;
    }
  }
  std::optional<std::vector<std::uint8_t>> labels;
  if (frame.has_labels()) labels = frame.labels();
  return SeriesFrame::create(frame.columns(), std::move(values), std::move(labels));
}

SeriesFrame denormalize_minmax(const SeriesFrame& frame, const NormalizationMap& map) {
  std::vector<double> values = frame.values();
  for (std::size_t c = 0; c < frame.cols(); ++c) {
    if (frame.column(c).kind != ColumnKind::kSensorContinuous) continue;
    auto it = map.bounds.find(frame.column(c).name);
    if (it == map.bounds.end()) {
      throw ValidationError("normalization map is missing column '" + frame.column(c).name + "'");
    }
    const auto [lo, hi] = it->second;
    for (std::size_t r = 0; r < frame.rows(); ++r) {
      double& x = values[r * frame.cols() + c];
      x = lo + x * (hi - lo);
    }
  }
  std::optional<std::vector<std::uint8_t>> labels;
  if (frame.has_labels()) labels = frame.labels();
  return SeriesFrame::create(frame.columns(), std::move(values), std::move(labels));
}

}  // namespace icsbench
