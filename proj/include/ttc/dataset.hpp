#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ttc/matrix.hpp"

namespace ttc {

// One labeled multivariate series: t time steps x m channels.
struct TimeSeriesSample {
  int id = 0;  // index within its split, file order
  Matrix values;
  std::string label;

  std::size_t length() const { return values.rows(); }
  std::size_t channels() const { return values.cols(); }
};

// Header metadata of a .ts file.
struct TsHeader {
  std::string problem_name;
  std::size_t dimensions = 0;
  std::size_t series_length = 0;
  std::vector<std::string> class_labels;  // declaration order
  bool univariate = false;
  bool equal_length = true;
  bool timestamps = false;
  bool missing = false;
};

// Hand-authored context for the prompt. Free text lives here, not in .ts files.
struct DatasetCard {
  std::string task_definition;
  std::string dataset_description;
  // Insertion-ordered: rendering and channel naming follow card order.
  std::vector<std::pair<std::string, std::string>> class_definitions;
  std::vector<std::pair<std::string, std::string>> channel_descriptions;
};

struct ChannelStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // population convention (divide by N)

  std::size_t channels() const { return mean.size(); }
};

struct Dataset {
  std::string name;
  std::vector<TimeSeriesSample> train;
  std::vector<TimeSeriesSample> test;
  std::vector<std::string> classes;        // header order
  std::vector<std::string> channel_names;  // card order, or dim_0..dim_{m-1}
  std::size_t series_length = 0;
  DatasetCard card;

  std::size_t channels() const { return channel_names.size(); }
};

struct ParsedTs {
  std::vector<TimeSeriesSample> samples;
  TsHeader header;
};

ParsedTs parse_ts_text(const std::string& text, const std::string& origin);
ParsedTs parse_ts_file(const std::filesystem::path& path);

// Inverse of parse_ts_text up to float formatting (shortest round-trip, so
// numeric values survive exactly). Used by tests and fixture generators.
std::string write_ts(const TsHeader& header, const std::vector<TimeSeriesSample>& samples);

struct LoadOptions {
  // When true and <name>_card.json is absent, substitute generic placeholder
  // text instead of failing.
  bool allow_missing_card = false;
  // Explicit card path overriding <dir>/<name>_card.json.
  std::optional<std::filesystem::path> card_path;
};

Dataset load_dataset(const std::filesystem::path& dir, const std::string& name,
                     const LoadOptions& options = {});

DatasetCard parse_card_json(const std::string& text, const std::string& origin);
DatasetCard placeholder_card(const std::string& dataset_name);

ChannelStats channel_stats(const std::vector<TimeSeriesSample>& train);

// Floor applied wherever a stddev is used as a divisor.
inline constexpr double kStdFloor = 1e-8;

}  // namespace ttc
