#pragma once

#include <charconv>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

namespace coexist::detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view text, std::size_t line) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument(fmt::format("line {}: '{}' is not a number", line, text));
  }
  return value;
}

/// Reads a header-checked, all-numeric CSV. Blank lines are skipped.
inline std::vector<std::vector<double>> read_numeric_csv(std::istream& in,
                                                         const std::vector<std::string>& header) {
  std::string line;
  std::size_t line_no = 0;
  std::string expected;
  for (std::size_t i = 0; i < header.size(); ++i) expected += (i ? "," : "") + header[i];
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV, expected header " + expected);
  ++line_no;
  if (trim(line) != expected) {
    throw std::invalid_argument(fmt::format("line 1: expected header '{}', got '{}'", expected, trim(line)));
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      row.push_back(parse_double(rest.substr(0, comma), line_no));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (row.size() != header.size()) {
      throw std::invalid_argument(
          fmt::format("line {}: expected {} fields, got {}", line_no, header.size(), row.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace coexist::detail
