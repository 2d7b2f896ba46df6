#include "cagekit/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cagekit::csv {
namespace {

void check_cell(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") != std::string::npos) {
    throw std::invalid_argument("csv: cell may not contain commas, quotes, or newlines: " + cell);
  }
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) throw std::invalid_argument("csv: refusing to serialize NaN");
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

double parse_double(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc{} || result.ptr != text.data() + text.size()) {
    throw std::invalid_argument("csv: not a number: '" + text + "'");
  }
  return value;
}

std::string serialize(const Table& table) {
  if (table.header.empty()) throw std::invalid_argument("csv: header row is required");
  std::ostringstream out;
  for (const auto& comment : table.comments) {
    if (comment.find('\n') != std::string::npos) {
      throw std::invalid_argument("csv: comment may not span lines");
    }
    out << "# " << comment << '\n';
  }
  const auto emit_row = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      check_cell(cells[i]);
      if (i > 0) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  emit_row(table.header);
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) {
      throw std::invalid_argument("csv: row width does not match header");
    }
    emit_row(row);
  }
  return out.str();
}

Table parse(const std::string& text) {
  Table table;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && !have_header) continue;
    if (line.rfind("#", 0) == 0) {
      if (have_header) throw std::invalid_argument("csv: comment after header");
      std::string body = line.substr(1);
      if (!body.empty() && body.front() == ' ') body.erase(body.begin());
      table.comments.push_back(body);
      continue;
    }
    auto cells = split_row(line);
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw std::invalid_argument("csv: row width does not match header");
    }
    table.rows.push_back(std::move(cells));
  }
  if (!have_header) throw std::invalid_argument("csv: missing header row");
  return table;
}

void write_file(const std::string& path, const Table& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("csv: cannot open for writing: " + path);
  out << serialize(table);
  if (!out) throw std::runtime_error("csv: write failed: " + path);
}

Table read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("csv: cannot open for reading: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

}  // namespace cagekit::csv
