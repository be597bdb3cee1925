#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ttc/config.hpp"
#include "ttc/dataset.hpp"

namespace ttc::cli {

// Raw flag values; nullopt/false = not given on the command line.
struct RawOptions {
  std::optional<std::string> config_path;
  std::optional<std::string> dataset;
  std::optional<std::string> data_dir;
  std::optional<std::string> metric;
  std::optional<int> dtw_window;
  std::optional<int> k;
  std::optional<int> negatives;
  std::optional<std::string> format;
  std::optional<int> precision;
  std::optional<std::string> temps;  // comma-separated
  std::optional<std::string> backend;
  std::optional<std::string> model;
  std::optional<std::uint64_t> seed;
  std::optional<int> parallelism;
  std::optional<int> max_tokens;
  std::optional<std::string> out;
  bool magic_words = false;
  bool znorm = false;
  bool resume = false;
  bool allow_missing_card = false;
  bool dump_prompts = false;
};

// Precedence: flags > environment (TT_API_URL, TT_API_KEY, TT_MODEL) > config
// file > built-in dataset profile > global defaults.
RunConfig resolve_run_config(const RawOptions& raw);

// Keys accepted in the JSON config file; the --help footer must list each.
const std::vector<std::string>& config_file_keys();

std::string help_text();

// Tries <data_dir>/<name> then the full archive name for known abbreviations;
// returns the directory and the name the files inside are prefixed with.
std::pair<std::filesystem::path, std::string> resolve_dataset_dir(
    const std::string& data_dir, const std::string& name);

Dataset load_dataset_for(const RunConfig& config);

int run(int argc, const char* const* argv);

}  // namespace ttc::cli
