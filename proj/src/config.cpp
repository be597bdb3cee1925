#include "ttc/config.hpp"

#include <map>

#include <nlohmann/json.hpp>

#include "ttc/error.hpp"
#include "ttc/util.hpp"

namespace ttc {
namespace {

const std::map<std::string, DatasetProfile>& profile_table() {
  static const std::map<std::string, DatasetProfile> table = {
      {"AWR", {MetricKind::Manhattan, 3, TableFormatKind::DFLoader}},
      {"AF", {MetricKind::Dtw, 6, TableFormatKind::Markdown}},
      {"BL", {MetricKind::StdEuclidean, 4, TableFormatKind::Markdown}},
      {"CR", {MetricKind::Manhattan, 1, TableFormatKind::DFLoader}},
      {"ER", {MetricKind::Manhattan, 2, TableFormatKind::DFLoader}},
      {"FM", {MetricKind::Manhattan, 5, TableFormatKind::DFLoader}},
      {"RS", {MetricKind::Manhattan, 2, TableFormatKind::Json}},
      {"SWJ", {MetricKind::StdEuclidean, 1, TableFormatKind::DFLoader}},
      {"SRS2", {MetricKind::StdEuclidean, 1, TableFormatKind::DFLoader}},
      {"UWG", {MetricKind::Manhattan, 2, TableFormatKind::Html}},
  };
  return table;
}

const std::map<std::string, std::string>& name_table() {
  static const std::map<std::string, std::string> table = {
      {"AWR", "ArticularyWordRecognition"},
      {"AF", "AtrialFibrillation"},
      {"BL", "Blink"},
      {"CR", "Cricket"},
      {"CK", "Cricket"},
      {"ER", "ERing"},
      {"FM", "FingerMovements"},
      {"RS", "RacketSports"},
      {"SWJ", "StandWalkJump"},
      {"SRS2", "SelfRegulationSCP2"},
      {"UWG", "UWaveGestureLibrary"},
  };
  return table;
}

}  // namespace

std::optional<DatasetProfile> dataset_profile(const std::string& name) {
  // CK appears as an alternate abbreviation for Cricket.
  const std::string key = name == "CK" ? "CR" : name;
  if (auto it = profile_table().find(key); it != profile_table().end()) return it->second;
  // Full archive names resolve to their abbreviation's profile.
  for (const auto& [abbrev, full] : name_table()) {
    if (full == name) return dataset_profile(abbrev);
  }
  return std::nullopt;
}

std::optional<std::string> full_dataset_name(const std::string& abbreviation) {
  if (auto it = name_table().find(abbreviation); it != name_table().end()) return it->second;
  return std::nullopt;
}

void RunConfig::validate() const {
  if (dataset.empty()) throw ConfigError("no dataset selected");
  if (precision <= 0) throw ConfigError("precision must be positive");
  if (temperatures.empty()) throw ConfigError("at least one temperature is required");
  for (double t : temperatures) {
    if (!(t >= 0.0 && t <= 2.0)) {
      throw ConfigError("temperature " + double_to_string(t) + " outside [0, 2]");
    }
  }
  if (parallelism < 1) throw ConfigError("parallelism must be at least 1");
  if (max_tokens < 1) throw ConfigError("max_tokens must be at least 1");
}

std::string RunConfig::config_hash() const {
  nlohmann::ordered_json j;
  j["dataset"] = dataset;
  j["metric"] = metric_kind_name(metric);
  if (dtw_window) j["dtw_window"] = *dtw_window;
  j["k"] = k;
  j["negatives"] = {{"count", n_neg},
                    {"k_clusters", neg_clusters},
                    {"seed", neg_seed},
                    {"raw_space", neg_raw_space}};
  j["format"] = format_kind_name(format);
  j["precision"] = precision;
  j["temperatures"] = temperatures;
  j["backend"] = backend;
  j["model"] = model;
  j["ensemble_models"] = ensemble_models;
  j["magic_words"] = magic_words;
  j["znorm"] = znorm;
  j["seed"] = seed;
  return to_hex(fnv1a64(j.dump()));
}

}  // namespace ttc
