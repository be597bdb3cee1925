#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ttc/backend.hpp"
#include "ttc/config.hpp"
#include "ttc/dataset.hpp"
#include "ttc/kmeans.hpp"
#include "ttc/prompt.hpp"

namespace ttc {

// One inference path; extracted is nullopt when the completion was
// unparseable or the path failed outright.
struct InferencePath {
  int path_index = 0;
  double temperature = 0.0;
  Completion completion;
  std::optional<std::string> extracted;
  std::optional<std::string> error;
};

struct Prediction {
  std::optional<std::string> final_label;  // nullopt = every path unparsed
  std::map<std::string, int> tally;        // parsed labels only
  std::vector<InferencePath> paths;
  bool tie_broken = false;
  PromptProvenance provenance;
  std::string nn_label;  // rank-1 neighbor's label
  std::string prompt_hash;
  std::string rendered_prompt;  // filled only when the run dumps prompts
};

// Keyword recognition over a completion:
//   1. bottom-up scan for a "label: <payload>" line whose payload, after
//      punctuation/quote trimming, case-insensitively names a class;
//   2. otherwise the last whole-token, case-insensitive class-name occurrence;
//   3. otherwise unparsed (nullopt).
// Returns the canonical class spelling.
std::optional<std::string> extract_label(const std::string& text,
                                         const std::vector<std::string>& classes);

struct PathOptions {
  std::string model_id;
  // When non-empty, path i runs with model_rotation[i % size] instead.
  std::vector<std::string> model_rotation;
  int max_tokens = 1024;
};

// One completion per temperature over the same bundle; individual failures are
// recorded on their path, but all paths failing throws.
std::vector<InferencePath> run_multi_path(const PromptBundle& bundle,
                                          const std::vector<double>& temperatures,
                                          Backend& backend,
                                          const std::vector<std::string>& classes,
                                          const PathOptions& options = {});

// Majority vote over parsed paths. Ties go to the tied label produced by the
// lowest-temperature path (lowest path index secondary). Throws when no path
// parsed.
Prediction majority_vote(std::vector<InferencePath> paths);

// Per-run pipeline state: retrieval metric, channel stats, cluster model, and
// the context/instruction blocks are computed once and shared across queries.
class Classifier {
 public:
  Classifier(const Dataset& dataset, const RunConfig& config, Backend& backend);

  Prediction classify_sample(const TimeSeriesSample& query) const;
  PromptBundle build_bundle(const TimeSeriesSample& query) const;

  const ChannelStats& stats() const { return stats_; }

 private:
  const Dataset& dataset_;
  RunConfig config_;
  Backend& backend_;
  ChannelStats stats_;
  std::optional<DistanceMetric> metric_;
  std::optional<ClusterModel> clusters_;
  ContextBlock context_;
  std::string instruction_;
  TableFormat table_format_;
};

Prediction classify_sample(const TimeSeriesSample& query, const Dataset& dataset,
                           const RunConfig& config, Backend& backend);

}  // namespace ttc
