#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ttc/dataset.hpp"
#include "ttc/matrix.hpp"

namespace ttc {

// The series recast as a table: a time column plus one named column per channel.
struct TableDocument {
  std::vector<long long> time_index;       // default 0..t-1
  std::vector<std::string> channel_names;  // length m
  Matrix values;                           // t x m
};

enum class TableFormatKind { DFLoader, Markdown, Json, Html };

struct TableFormat {
  TableFormatKind kind = TableFormatKind::DFLoader;
  int float_precision = 4;  // decimal places before trailing-zero trimming
};

// CLI/config format names: "dfloader", "markdown", "json", "html".
TableFormatKind parse_format_kind(const std::string& name);
std::string format_kind_name(TableFormatKind kind);

// Fixed-point with `precision` decimals, then trailing zeros and a bare
// trailing point stripped: 1.5000 -> "1.5", 2.0000 -> "2". Locale-independent.
std::string format_float(double value, int precision);

TableDocument to_table(const TimeSeriesSample& sample,
                       const std::vector<std::string>& channel_names);

// Deterministic text per the per-format grammar; byte-identical for identical
// inputs. Newline is "\n" throughout.
std::string serialize(const TableDocument& table, const TableFormat& format);

// Grammar-aware inverse of serialize, for round-trip verification. Recovers
// values within 0.5 * 10^-precision.
TableDocument parse_table(const std::string& text, const TableFormat& format);

// ceil(chars / 4); a budget guard, not a tokenizer.
std::size_t estimate_tokens(const std::string& text);

}  // namespace ttc
