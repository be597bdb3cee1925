#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ttc/distance.hpp"
#include "ttc/table.hpp"

namespace ttc {

// Per-dataset retrieval defaults compiled in for the ten benchmark datasets.
struct DatasetProfile {
  MetricKind metric;
  std::size_t k;
  TableFormatKind format;
};

std::optional<DatasetProfile> dataset_profile(const std::string& name);

// Abbreviation -> archive directory name (AF -> AtrialFibrillation, ...).
std::optional<std::string> full_dataset_name(const std::string& abbreviation);

struct RunConfig {
  std::string dataset;
  std::string data_dir = "data";

  MetricKind metric = MetricKind::Manhattan;
  std::optional<std::size_t> dtw_window;
  std::size_t k = 1;

  std::size_t n_neg = 0;           // contrastive negatives per query; 0 = off
  std::size_t neg_clusters = 0;    // 0 = one cluster per class
  std::uint64_t neg_seed = 0;
  bool neg_raw_space = false;      // cluster raw vectors instead of z-normalized

  TableFormatKind format = TableFormatKind::DFLoader;
  int precision = 4;

  std::vector<double> temperatures = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::string backend = "mock";
  std::string model;
  std::string api_url;  // http backend endpoint; excluded from config_hash
  std::string api_key;  // never hashed or echoed
  std::vector<std::string> ensemble_models;  // optional multi-model rotation
  int max_tokens = 1024;

  bool magic_words = false;
  bool znorm = false;  // z-normalize series before the whole pipeline
  std::uint64_t seed = 0;
  int parallelism = 4;

  std::string out_dir = "runs";
  bool resume = false;
  bool dump_prompts = false;
  bool allow_missing_card = false;

  void validate() const;
  std::string config_hash() const;  // over result-affecting fields only
};

}  // namespace ttc
