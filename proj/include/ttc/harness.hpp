#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ttc/backend.hpp"
#include "ttc/config.hpp"
#include "ttc/dataset.hpp"
#include "ttc/ensemble.hpp"

namespace ttc {

// Serialized per-path outcome inside a SampleRecord.
struct PathRecord {
  int path_index = 0;
  double temperature = 0.0;
  std::string extracted;  // class name or "UNPARSED"
  std::optional<std::string> error;
};

struct NeighborRecord {
  int index = 0;
  double distance = 0.0;
  std::string label;
};

inline constexpr const char* kUnparsed = "UNPARSED";

struct SampleRecord {
  int id = 0;
  std::string true_label;
  std::string predicted;  // class name or "UNPARSED"
  std::vector<PathRecord> paths;
  std::vector<NeighborRecord> neighbors;
  std::vector<NeighborRecord> negatives;
  std::string nn_label;
  std::string prompt_hash;
  bool tie_broken = false;
  std::int64_t timing_ms = 0;

  bool correct() const { return predicted == true_label; }
};

std::string record_to_json_line(const SampleRecord& record);
SampleRecord record_from_json_line(const std::string& line);

struct ClassScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Counts over (prediction agrees with nn_label) x (prediction correct).
struct ConsistencyTable {
  std::size_t agree_correct = 0;
  std::size_t agree_incorrect = 0;
  std::size_t disagree_correct = 0;
  std::size_t disagree_incorrect = 0;

  double agree_correct_rate() const;
  double disagree_correct_rate() const;
  std::size_t total() const {
    return agree_correct + agree_incorrect + disagree_correct + disagree_incorrect;
  }
};

struct EvalReport {
  double accuracy = 0.0;  // UNPARSED counts as incorrect
  double macro_f1 = 0.0;
  std::map<std::string, ClassScore> per_class;
  ConsistencyTable consistency;
  std::size_t unparsed = 0;
  std::size_t samples = 0;
  std::string dataset;
  std::string config_hash;

  std::string to_json() const;
};

// Unweighted mean of per-class F1 over the full class set; a class absent
// from both truth and predictions contributes 0. UNPARSED matches no class.
double macro_f1(const std::vector<SampleRecord>& records,
                const std::vector<std::string>& classes);

std::map<std::string, ClassScore> per_class_scores(const std::vector<SampleRecord>& records,
                                                   const std::vector<std::string>& classes);

ConsistencyTable consistency_breakdown(const std::vector<SampleRecord>& records);

// Average rank per method: rank by accuracy descending per dataset, average
// ranks on ties, then mean across datasets. Every method must cover the same
// dataset set.
std::map<std::string, double> mean_ranks(
    const std::map<std::string, std::map<std::string, double>>& accuracies);

EvalReport compute_report(const std::vector<SampleRecord>& records,
                          const std::vector<std::string>& classes);

struct RunResult {
  std::vector<SampleRecord> records;
  EvalReport report;
  std::filesystem::path run_dir;
};

// Classifies every test sample, streaming records to
// <out>/<dataset>/<config-hash>/records.jsonl in id order (crash-resumable:
// resume keeps the longest valid prefix and continues). The report lands in
// report.json next to it.
RunResult run_experiment(const RunConfig& config, const Dataset& dataset, Backend& backend);

}  // namespace ttc
