#pragma once

#include <stdexcept>
#include <string>

namespace icsbench {

/// Error while reading a CSV capture; carries the offending row/column when
/// known (1-based row counting, header = row 1).
class ParseError : public std::runtime_error {
public:
  ParseError(std::string message, std::size_t row = 0, std::string column = {});
  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }

private:
  std::size_t row_;
  std::string column_;
};

/// Invalid input, configuration, or contract violation.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace icsbench
