#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pdm {

// Base for every failure the pipeline reports. `kind` is a short stable tag
// ("parse", "parameter", "data", "numerical", "io", "contract") used in the
// machine-readable error output of the CLI.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

class ParseError : public Error {
public:
  ParseError(const std::string& message, long row, long column)
      : Error("parse", message), row_(row), column_(column) {}

  // 1-based file line and column; 0 when not applicable.
  long row() const noexcept { return row_; }
  long column() const noexcept { return column_; }

private:
  long row_;
  long column_;
};

} // namespace pdm
