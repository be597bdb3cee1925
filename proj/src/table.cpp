#include "ttc/table.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <numeric>

#include <nlohmann/json.hpp>

#include "ttc/error.hpp"
#include "ttc/util.hpp"

namespace ttc {
namespace {

void check_table(const TableDocument& table) {
  if (table.values.empty()) throw Error("table has no values");
  if (table.time_index.size() != table.values.rows()) {
    throw Error("table time index length does not match row count");
  }
  if (table.channel_names.size() != table.values.cols()) {
    throw Error("table channel name count does not match column count");
  }
}

std::string serialize_dfloader(const TableDocument& t, int precision) {
  std::string out = "pd.DataFrame({\n";
  auto column = [&](const std::string& name, auto&& cell) {
    out += "\"" + name + "\": [";
    for (std::size_t i = 0; i < t.values.rows(); ++i) {
      if (i > 0) out += ", ";
      out += cell(i);
    }
    out += "],\n";
  };
  column("time", [&](std::size_t i) { return std::to_string(t.time_index[i]); });
  for (std::size_t j = 0; j < t.channel_names.size(); ++j) {
    column(t.channel_names[j],
           [&](std::size_t i) { return format_float(t.values(i, j), precision); });
  }
  out += "})";
  return out;
}

std::string serialize_markdown(const TableDocument& t, int precision) {
  std::string out = "| time |";
  for (const auto& name : t.channel_names) out += " " + name + " |";
  out += "\n| --- |";
  for (std::size_t j = 0; j < t.channel_names.size(); ++j) out += " --- |";
  for (std::size_t i = 0; i < t.values.rows(); ++i) {
    out += "\n| " + std::to_string(t.time_index[i]) + " |";
    for (std::size_t j = 0; j < t.values.cols(); ++j) {
      out += " " + format_float(t.values(i, j), precision) + " |";
    }
  }
  return out;
}

std::string serialize_json(const TableDocument& t, int precision) {
  std::string out = "[";
  for (std::size_t i = 0; i < t.values.rows(); ++i) {
    if (i > 0) out += ", ";
    out += "{\"time\": " + std::to_string(t.time_index[i]);
    for (std::size_t j = 0; j < t.values.cols(); ++j) {
      out += ", \"" + t.channel_names[j] + "\": " + format_float(t.values(i, j), precision);
    }
    out += "}";
  }
  out += "]";
  return out;
}

std::string serialize_html(const TableDocument& t, int precision) {
  std::string out = "<table><thead><tr><th>time</th>";
  for (const auto& name : t.channel_names) out += "<th>" + name + "</th>";
  out += "</tr></thead><tbody>";
  for (std::size_t i = 0; i < t.values.rows(); ++i) {
    out += "<tr><td>" + std::to_string(t.time_index[i]) + "</td>";
    for (std::size_t j = 0; j < t.values.cols(); ++j) {
      out += "<td>" + format_float(t.values(i, j), precision) + "</td>";
    }
    out += "</tr>";
  }
  out += "</tbody></table>";
  return out;
}

TableDocument table_from_columns(std::vector<std::string> names,
                                 std::vector<std::vector<std::string>> columns,
                                 const std::string& origin) {
  if (names.empty() || names.front() != "time") {
    throw ParseError(origin + ": first column must be 'time'");
  }
  if (columns.front().empty()) throw ParseError(origin + ": no data rows");
  const std::size_t rows = columns.front().size();
  for (const auto& col : columns) {
    if (col.size() != rows) throw ParseError(origin + ": ragged columns");
  }

  TableDocument table;
  table.channel_names.assign(names.begin() + 1, names.end());
  table.values = Matrix(rows, names.size() - 1);
  for (std::size_t i = 0; i < rows; ++i) {
    table.time_index.push_back(
        static_cast<long long>(parse_double(columns[0][i], origin + " time cell")));
    for (std::size_t j = 1; j < names.size(); ++j) {
      table.values(i, j - 1) = parse_double(columns[j][i], origin + " cell");
    }
  }
  return table;
}

TableDocument parse_dfloader(const std::string& text) {
  const auto lines = split(text, '\n');
  if (lines.size() < 3 || trim(lines.front()) != "pd.DataFrame({" ||
      trim(lines.back()) != "})") {
    throw ParseError("dfloader: expected pd.DataFrame({ ... }) layout");
  }
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> columns;
  for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    const std::size_t colon = line.find("\": [");
    if (line.size() < 2 || line.front() != '"' || colon == std::string_view::npos ||
        line.substr(line.size() - 2) != "],") {
      throw ParseError("dfloader: malformed column line '" + std::string(line) + "'");
    }
    names.emplace_back(line.substr(1, colon - 1));
    const std::string_view body = line.substr(colon + 4, line.size() - (colon + 4) - 2);
    std::vector<std::string> cells;
    if (!trim(body).empty()) {
      for (auto& cell : split(body, ',')) cells.emplace_back(trim(cell));
    }
    columns.push_back(std::move(cells));
  }
  if (names.empty()) throw ParseError("dfloader: no columns");
  return table_from_columns(std::move(names), std::move(columns), "dfloader");
}

TableDocument parse_markdown(const std::string& text) {
  const auto lines = split(text, '\n');
  if (lines.size() < 3) throw ParseError("markdown: expected header, separator, and rows");
  auto cells_of = [](const std::string& line) {
    const std::string_view body = trim(line);
    if (body.size() < 2 || body.front() != '|' || body.back() != '|') {
      throw ParseError("markdown: row must be pipe-delimited: '" + std::string(body) + "'");
    }
    std::vector<std::string> cells;
    for (auto& cell : split(body.substr(1, body.size() - 2), '|')) {
      cells.emplace_back(trim(cell));
    }
    return cells;
  };

  const auto header = cells_of(lines[0]);
  for (const auto& cell : cells_of(lines[1])) {
    if (cell != "---") throw ParseError("markdown: bad separator row");
  }

  std::vector<std::vector<std::string>> columns(header.size());
  for (std::size_t i = 2; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const auto row = cells_of(lines[i]);
    if (row.size() != header.size()) throw ParseError("markdown: ragged row");
    for (std::size_t j = 0; j < row.size(); ++j) columns[j].push_back(row[j]);
  }
  return table_from_columns(header, std::move(columns), "markdown");
}

TableDocument parse_json_table(const std::string& text) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("json table: ") + ex.what());
  }
  if (!doc.is_array() || doc.empty()) throw ParseError("json table: expected non-empty array");

  std::vector<std::string> names;
  for (const auto& item : doc.front().items()) names.push_back(item.key());

  std::vector<std::vector<std::string>> columns(names.size());
  for (const auto& row : doc) {
    if (!row.is_object() || row.size() != names.size()) {
      throw ParseError("json table: inconsistent row object");
    }
    std::size_t j = 0;
    for (const auto& item : row.items()) {
      if (item.key() != names[j]) throw ParseError("json table: key order mismatch");
      columns[j].push_back(item.value().dump());
      ++j;
    }
  }
  return table_from_columns(std::move(names), std::move(columns), "json table");
}

TableDocument parse_html(const std::string& text) {
  // Minimal scanner for the exact markup serialize_html emits.
  std::size_t pos = 0;
  auto expect = [&](std::string_view tag) {
    if (text.compare(pos, tag.size(), tag) != 0) {
      throw ParseError("html table: expected '" + std::string(tag) + "' at offset " +
                       std::to_string(pos));
    }
    pos += tag.size();
  };
  auto try_consume = [&](std::string_view tag) {
    if (text.compare(pos, tag.size(), tag) == 0) {
      pos += tag.size();
      return true;
    }
    return false;
  };
  auto cell_until = [&](std::string_view close) {
    const std::size_t end = text.find(close, pos);
    if (end == std::string::npos) {
      throw ParseError("html table: unterminated cell at offset " + std::to_string(pos));
    }
    std::string cell = text.substr(pos, end - pos);
    pos = end + close.size();
    return cell;
  };

  expect("<table><thead><tr>");
  std::vector<std::string> names;
  while (try_consume("<th>")) names.push_back(cell_until("</th>"));
  expect("</tr></thead><tbody>");
  std::vector<std::vector<std::string>> columns(names.size());
  while (try_consume("<tr>")) {
    for (std::size_t j = 0; j < names.size(); ++j) {
      expect("<td>");
      columns[j].push_back(cell_until("</td>"));
    }
    expect("</tr>");
  }
  expect("</tbody></table>");
  if (pos != text.size()) throw ParseError("html table: trailing content");
  if (names.empty()) throw ParseError("html table: no header cells");
  return table_from_columns(std::move(names), std::move(columns), "html table");
}

}  // namespace

TableFormatKind parse_format_kind(const std::string& name) {
  const std::string lowered = to_lower(name);
  if (lowered == "dfloader") return TableFormatKind::DFLoader;
  if (lowered == "markdown") return TableFormatKind::Markdown;
  if (lowered == "json") return TableFormatKind::Json;
  if (lowered == "html") return TableFormatKind::Html;
  throw ConfigError("unknown table format '" + name +
                    "' (expected dfloader, markdown, json, or html)");
}

std::string format_kind_name(TableFormatKind kind) {
  switch (kind) {
    case TableFormatKind::DFLoader: return "dfloader";
    case TableFormatKind::Markdown: return "markdown";
    case TableFormatKind::Json: return "json";
    case TableFormatKind::Html: return "html";
  }
  return "?";
}

std::string format_float(double value, int precision) {
  if (precision <= 0) throw Error("float precision must be positive");
  std::array<char, 512> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::fixed, precision);
  if (ec != std::errc()) throw Error("float formatting failed");
  std::string s(buf.data(), ptr);

  const std::size_t point = s.find('.');
  if (point != std::string::npos) {
    std::size_t end = s.size();
    while (end > point + 1 && s[end - 1] == '0') --end;
    if (end == point + 1) --end;  // drop a bare trailing point
    s.erase(end);
  }
  if (s == "-0") s = "0";
  return s;
}

TableDocument to_table(const TimeSeriesSample& sample,
                       const std::vector<std::string>& channel_names) {
  if (channel_names.size() != sample.channels()) {
    throw Error("to_table: " + std::to_string(channel_names.size()) +
                " channel names for " + std::to_string(sample.channels()) + " channels");
  }
  TableDocument table;
  table.channel_names = channel_names;
  table.values = sample.values;
  table.time_index.resize(sample.length());
  std::iota(table.time_index.begin(), table.time_index.end(), 0LL);
  return table;
}

std::string serialize(const TableDocument& table, const TableFormat& format) {
  check_table(table);
  switch (format.kind) {
    case TableFormatKind::DFLoader: return serialize_dfloader(table, format.float_precision);
    case TableFormatKind::Markdown: return serialize_markdown(table, format.float_precision);
    case TableFormatKind::Json: return serialize_json(table, format.float_precision);
    case TableFormatKind::Html: return serialize_html(table, format.float_precision);
  }
  throw Error("serialize: unreachable");
}

TableDocument parse_table(const std::string& text, const TableFormat& format) {
  if (trim(text).empty()) throw ParseError("empty table text");
  switch (format.kind) {
    case TableFormatKind::DFLoader: return parse_dfloader(text);
    case TableFormatKind::Markdown: return parse_markdown(text);
    case TableFormatKind::Json: return parse_json_table(text);
    case TableFormatKind::Html: return parse_html(text);
  }
  throw Error("parse_table: unreachable");
}

std::size_t estimate_tokens(const std::string& text) {
  return (text.size() + 3) / 4;
}

}  // namespace ttc
