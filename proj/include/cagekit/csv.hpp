#pragma once

#include <string>
#include <vector>

namespace cagekit::csv {

// Unquoted dialect: cells may not contain commas, quotes, or newlines.
// Comment lines start with "# " and live above the header; the body below
// them is what determinism guarantees cover.
struct Table {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Shortest decimal string that parses back to the same double. Infinities
// print as "inf"/"-inf"; NaN is rejected.
std::string format_double(double value);
double parse_double(const std::string& text);

std::string serialize(const Table& table);
Table parse(const std::string& text);

void write_file(const std::string& path, const Table& table);
Table read_file(const std::string& path);

}  // namespace cagekit::csv
