#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <string>

#include "cagekit/csv.hpp"
#include "doctest.h"

using cagekit::csv::Table;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Table sample_table() {
  Table table;
  table.comments = {"cagekit csv format_version=1", "generated for tests"};
  table.header = {"seed", "value", "label"};
  table.rows = {{"1", "0.5", "alpha"}, {"2", "", "beta"}, {"3", "-1e-9", "gamma"}};
  return table;
}

}  // namespace

TEST_CASE("doubles survive a format round trip bitwise") {
  for (const double v : {0.0, 1.0, -2.5, 0.1, 9.81, 2.943, 1.0 / 3.0, 1e300, 5e-324,
                         0.30000000000000004, -123456.789}) {
    const auto text = cagekit::csv::format_double(v);
    CHECK(cagekit::csv::parse_double(text) == v);
    CHECK(text.find(',') == std::string::npos);
  }
}

TEST_CASE("infinities have a fixed token and NaN is rejected") {
  CHECK(cagekit::csv::format_double(kInf) == "inf");
  CHECK(cagekit::csv::format_double(-kInf) == "-inf");
  CHECK(std::isinf(cagekit::csv::parse_double("inf")));
  CHECK(cagekit::csv::parse_double("-inf") < 0);
  CHECK_THROWS_AS(cagekit::csv::format_double(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(cagekit::csv::parse_double("abc"), std::invalid_argument);
  CHECK_THROWS_AS(cagekit::csv::parse_double("1.5x"), std::invalid_argument);
  CHECK_THROWS_AS(cagekit::csv::parse_double(""), std::invalid_argument);
}

TEST_CASE("tables serialize to a stable body and parse back identically") {
  const auto table = sample_table();
  const auto text = cagekit::csv::serialize(table);
  CHECK(text ==
        "# cagekit csv format_version=1\n"
        "# generated for tests\n"
        "seed,value,label\n"
        "1,0.5,alpha\n"
        "2,,beta\n"
        "3,-1e-9,gamma\n");

  const auto parsed = cagekit::csv::parse(text);
  CHECK(parsed.comments == table.comments);
  CHECK(parsed.header == table.header);
  CHECK(parsed.rows == table.rows);
  CHECK(cagekit::csv::serialize(parsed) == text);
}

TEST_CASE("malformed tables are rejected") {
  Table table = sample_table();
  table.rows.push_back({"only", "two"});
  CHECK_THROWS_AS(cagekit::csv::serialize(table), std::invalid_argument);

  table = sample_table();
  table.rows[0][2] = "has,comma";
  CHECK_THROWS_AS(cagekit::csv::serialize(table), std::invalid_argument);

  table = sample_table();
  table.header.clear();
  CHECK_THROWS_AS(cagekit::csv::serialize(table), std::invalid_argument);

  CHECK_THROWS_AS(cagekit::csv::parse(""), std::invalid_argument);
  CHECK_THROWS_AS(cagekit::csv::parse("a,b\n1,2,3\n"), std::invalid_argument);
  CHECK_THROWS_AS(cagekit::csv::parse("a,b\n1,2\n# late comment\n"), std::invalid_argument);
}

TEST_CASE("tables round-trip through a file") {
  namespace fs = std::filesystem;
  const auto path = (fs::temp_directory_path() / "cagekit_csv_roundtrip.csv").string();
  const auto table = sample_table();
  cagekit::csv::write_file(path, table);
  const auto loaded = cagekit::csv::read_file(path);
  CHECK(loaded.header == table.header);
  CHECK(loaded.rows == table.rows);
  CHECK(cagekit::csv::serialize(loaded) == cagekit::csv::serialize(table));
  std::remove(path.c_str());

  CHECK_THROWS_AS(cagekit::csv::read_file("/nonexistent/dir/x.csv"), std::runtime_error);
  CHECK_THROWS_AS(cagekit::csv::write_file("/nonexistent/dir/x.csv", table), std::runtime_error);
}
