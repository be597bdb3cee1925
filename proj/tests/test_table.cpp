#include <doctest.h>

#include <cmath>

#include "support/helpers.hpp"
#include "support/synthetic.hpp"
#include "ttc/error.hpp"
#include "ttc/rng.hpp"
#include "ttc/table.hpp"

using namespace ttc;
using namespace ttc::testing;

namespace {

TableDocument tiny_table() {
  TableDocument table;
  table.time_index = {0};
  table.channel_names = {"a", "b"};
  table.values = Matrix::from_rows({{1.0, 2.5}});
  return table;
}

TableDocument fixed_table() {
  TableDocument table;
  table.time_index = {0, 1, 2};
  table.channel_names = {"accel_x", "accel_y"};
  table.values = Matrix::from_rows(
      {{1.0, -0.5}, {2.0001, 0.0}, {-3.14159, 1234.5678}});
  return table;
}

TableDocument random_table(Rng& rng) {
  TableDocument table;
  const std::size_t t = 1 + rng.uniform_index(20);
  const std::size_t m = 1 + rng.uniform_index(6);
  table.values = Matrix(t, m);
  for (std::size_t i = 0; i < t; ++i) {
    table.time_index.push_back(static_cast<long long>(i));
    for (std::size_t j = 0; j < m; ++j) table.values(i, j) = rng.uniform(-100.0, 100.0);
  }
  for (std::size_t j = 0; j < m; ++j) table.channel_names.push_back("ch" + std::to_string(j));
  return table;
}

const std::vector<TableFormatKind> kAllKinds = {
    TableFormatKind::DFLoader, TableFormatKind::Markdown, TableFormatKind::Json,
    TableFormatKind::Html};

}  // namespace

TEST_SUITE("table") {

TEST_CASE("float rule: fixed, trim zeros, trim bare point") {
  CHECK(format_float(1.5, 4) == "1.5");
  CHECK(format_float(2.0, 4) == "2");
  CHECK(format_float(-0.00004, 4) == "0");
  CHECK(format_float(-1.25, 4) == "-1.25");
  CHECK(format_float(3.14159265, 4) == "3.1416");
  CHECK(format_float(1234.00010, 4) == "1234.0001");
  CHECK(format_float(0.5, 1) == "0.5");
  CHECK(format_float(123456789.0, 4) == "123456789");
}

TEST_CASE("to_table copies values and numbers time steps") {
  TimeSeriesSample sample;
  sample.values = Matrix::from_rows({{1.0, 2.0}, {3.0, 4.0}});
  const auto table = to_table(sample, {"a", "b"});
  CHECK(table.time_index == std::vector<long long>{0, 1});
  CHECK(table.channel_names == std::vector<std::string>{"a", "b"});
  CHECK(table.values == sample.values);

  CHECK_THROWS_AS(to_table(sample, {"only_one"}), Error);

  TimeSeriesSample cell;
  cell.values = Matrix::from_rows({{7.0}});
  const auto one = to_table(cell, {"x"});
  CHECK(one.values.rows() == 1);
  CHECK(one.values.cols() == 1);
}

TEST_CASE("markdown and json grammars are forced on the 1x2 example") {
  const auto table = tiny_table();
  CHECK(serialize(table, {TableFormatKind::Markdown, 4}) ==
        "| time | a | b |\n| --- | --- | --- |\n| 0 | 1 | 2.5 |");
  CHECK(serialize(table, {TableFormatKind::Json, 4}) ==
        "[{\"time\": 0, \"a\": 1, \"b\": 2.5}]");

  const auto parsed = parse_table(serialize(table, {TableFormatKind::Markdown, 4}),
                                  {TableFormatKind::Markdown, 4});
  CHECK(parsed.channel_names == std::vector<std::string>{"a", "b"});
  CHECK(parsed.values(0, 0) == 1.0);
  CHECK(parsed.values(0, 1) == 2.5);
}

TEST_CASE("golden files pin each grammar byte for byte") {
  const auto table = fixed_table();
  const std::filesystem::path dir = std::string(TTC_TESTS_DIR) + "/golden/tables";
  for (const auto kind : kAllKinds) {
    const std::string text = serialize(table, {kind, 4});
    const std::string diagnosis = check_golden(dir / (format_kind_name(kind) + ".golden"), text);
    INFO(diagnosis);
    CHECK(diagnosis.empty());
  }
}

TEST_CASE("serialize is deterministic") {
  Rng rng(31);
  const auto table = random_table(rng);
  for (const auto kind : kAllKinds) {
    CHECK(serialize(table, {kind, 4}) == serialize(table, {kind, 4}));
  }
}

TEST_CASE("round-trip recovers values within the precision bound") {
  Rng rng(404);
  for (int round = 0; round < 100; ++round) {
    const auto table = random_table(rng);
    const int precision = 1 + static_cast<int>(rng.uniform_index(6));
    const double bound = 0.5 * std::pow(10.0, -precision);
    for (const auto kind : kAllKinds) {
      const TableFormat format{kind, precision};
      const auto parsed = parse_table(serialize(table, format), format);
      REQUIRE(parsed.values.rows() == table.values.rows());
      REQUIRE(parsed.values.cols() == table.values.cols());
      CHECK(parsed.channel_names == table.channel_names);
      CHECK(parsed.time_index == table.time_index);
      for (std::size_t i = 0; i < table.values.rows(); ++i) {
        for (std::size_t j = 0; j < table.values.cols(); ++j) {
          CHECK(std::abs(parsed.values(i, j) - table.values(i, j)) <= bound + 1e-15);
        }
      }
    }
  }
}

TEST_CASE("serialized output carries exactly the declared cells") {
  Rng rng(77);
  const auto table = random_table(rng);
  const std::size_t t = table.values.rows();
  const std::size_t m = table.values.cols();

  auto count = [](const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size())) {
      ++n;
    }
    return n;
  };

  const std::string markdown = serialize(table, {TableFormatKind::Markdown, 4});
  CHECK(count(markdown, "\n") == t + 1);  // header + separator + t rows
  const std::string html = serialize(table, {TableFormatKind::Html, 4});
  CHECK(count(html, "<tr>") == t + 1);
  CHECK(count(html, "<td>") == t * (m + 1));
  const std::string dfloader = serialize(table, {TableFormatKind::DFLoader, 4});
  CHECK(count(dfloader, "\": [") == m + 1);
  const std::string json = serialize(table, {TableFormatKind::Json, 4});
  CHECK(count(json, "{") == t);
  CHECK(count(json, "\"time\"") == t);
}

TEST_CASE("parse_table rejects garbage") {
  CHECK_THROWS_AS(parse_table("", {TableFormatKind::Json, 4}), ParseError);
  CHECK_THROWS_AS(parse_table("  ", {TableFormatKind::Markdown, 4}), ParseError);
  CHECK_THROWS_AS(parse_table("pd.DataFrame({", {TableFormatKind::DFLoader, 4}), ParseError);
  CHECK_THROWS_AS(parse_table("[1, 2]", {TableFormatKind::Json, 4}), ParseError);
  CHECK_THROWS_AS(parse_table("<table></table>", {TableFormatKind::Html, 4}), ParseError);
  CHECK_THROWS_AS(parse_table("| a |\n| --- |\n| 1 |", {TableFormatKind::Markdown, 4}),
                  ParseError);  // first column must be time
}

TEST_CASE("token estimate is ceil(chars / 4)") {
  CHECK(estimate_tokens("") == 0);
  CHECK(estimate_tokens("12345678") == 2);
  CHECK(estimate_tokens("123456789") == 3);
}

TEST_CASE("format names round-trip and reject unknowns") {
  for (const auto kind : kAllKinds) {
    CHECK(parse_format_kind(format_kind_name(kind)) == kind);
  }
  CHECK_THROWS_WITH_AS(parse_format_kind("yaml"),
                       "unknown table format 'yaml' (expected dfloader, markdown, json, or "
                       "html)",
                       ConfigError);
}

}  // TEST_SUITE
