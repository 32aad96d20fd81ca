#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pdm::csv {

// Splits one CSV record. Double-quoted fields may contain commas and
// doubled quotes; embedded newlines are not supported.
std::vector<std::string> split_record(std::string_view line);

// Quotes a field only when it needs it.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

struct Line {
  long number; // 1-based
  std::string text;
};

// Reads non-empty lines, stripping a trailing '\r'.
std::vector<Line> read_lines(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace pdm::csv
