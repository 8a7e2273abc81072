#pragma once

#include <charconv>
#include <cstddef>
#include <istream>
#include <string>
#include <vector>

#include "metastab/family.hpp"
#include "metastab/sequence.hpp"

namespace metastab {

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

inline double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  if (cell.empty()) throw ingest_error("empty cell", row, col);
  double v = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size())
    throw ingest_error("non-numeric cell '" + cell + "'", row, col);
  return v;
}

} // namespace detail

// CSV of decimals, one sequence per row, all rows the same length. Rows and
// columns are reported 1-based in errors. Blank trailing lines are ignored;
// a blank line between data rows is an error.
inline family_spec<double> ingest_trace(std::istream& is, const std::string& provenance) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t blank_after_data = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (detail::trim(line).empty()) {
      if (!rows.empty()) blank_after_data = lineno;
      continue;
    }
    if (blank_after_data) throw ingest_error("blank line inside data", blank_after_data);
    auto cells = detail::split_csv_line(line);
    std::vector<double> values;
    values.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
      values.push_back(detail::parse_cell(cells[c], rows.size() + 1, c + 1));
    if (!rows.empty() && values.size() != rows.front().size())
      throw ingest_error("row length " + std::to_string(values.size()) +
                             " differs from row 1 length " +
                             std::to_string(rows.front().size()),
                         rows.size() + 1);
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw config_error("trace '" + provenance + "' is empty");

  std::vector<trace_sequence> members;
  members.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    members.emplace_back(std::move(rows[r]), source_kind::trace, "row@" + std::to_string(r));
  return {family_sample<double>(std::move(members), "trace(" + provenance + ")"), nullptr};
}

} // namespace metastab
