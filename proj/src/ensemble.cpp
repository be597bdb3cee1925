#include "ttc/ensemble.hpp"

#include <algorithm>
#include <cctype>

#include "ttc/table.hpp"
#include "ttc/util.hpp"

namespace ttc {
namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string_view trim_payload(std::string_view s) {
  static constexpr std::string_view kJunk = " \t\r.,;:!?'\"`*()[]{}<>";
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && kJunk.find(s[begin]) != std::string_view::npos) ++begin;
  while (end > begin && kJunk.find(s[end - 1]) != std::string_view::npos) --end;
  return s.substr(begin, end - begin);
}

// Accepts "Label: x", "  label : x", "**Label:** x".
std::optional<std::string> payload_of_label_line(std::string_view line) {
  std::size_t pos = 0;
  while (pos < line.size() &&
         (std::isspace(static_cast<unsigned char>(line[pos])) || line[pos] == '*' ||
          line[pos] == '#' || line[pos] == '>' || line[pos] == '-')) {
    ++pos;
  }
  static constexpr std::string_view kWord = "label";
  if (line.size() - pos < kWord.size()) return std::nullopt;
  for (std::size_t i = 0; i < kWord.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(line[pos + i])) != kWord[i]) {
      return std::nullopt;
    }
  }
  pos += kWord.size();
  while (pos < line.size() && (std::isspace(static_cast<unsigned char>(line[pos])) ||
                               line[pos] == '*')) {
    ++pos;
  }
  if (pos >= line.size() || line[pos] != ':') return std::nullopt;
  return std::string(line.substr(pos + 1));
}

}  // namespace

std::optional<std::string> extract_label(const std::string& text,
                                         const std::vector<std::string>& classes) {
  const auto lines = split(text, '\n');

  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    const auto payload = payload_of_label_line(*it);
    if (!payload) continue;
    const std::string_view cleaned = trim_payload(*payload);
    if (cleaned.empty()) continue;
    for (const auto& cls : classes) {
      if (iequals(cleaned, cls)) return cls;
    }
  }

  const std::string haystack = to_lower(text);
  const std::string* best_class = nullptr;
  std::size_t best_pos = 0;
  std::size_t best_len = 0;
  for (const auto& cls : classes) {
    const std::string needle = to_lower(cls);
    std::size_t from = 0;
    while (true) {
      const std::size_t pos = haystack.find(needle, from);
      if (pos == std::string::npos) break;
      from = pos + 1;
      const bool left_ok = pos == 0 || !is_word_char(haystack[pos - 1]);
      const std::size_t after = pos + needle.size();
      const bool right_ok = after >= haystack.size() || !is_word_char(haystack[after]);
      if (!left_ok || !right_ok) continue;
      if (!best_class || pos > best_pos || (pos == best_pos && needle.size() > best_len)) {
        best_class = &cls;
        best_pos = pos;
        best_len = needle.size();
      }
    }
  }
  if (best_class) return *best_class;
  return std::nullopt;
}

std::vector<InferencePath> run_multi_path(const PromptBundle& bundle,
                                          const std::vector<double>& temperatures,
                                          Backend& backend,
                                          const std::vector<std::string>& classes,
                                          const PathOptions& options) {
  if (temperatures.empty()) throw Error("run_multi_path: no temperatures given");

  std::vector<InferencePath> paths;
  paths.reserve(temperatures.size());
  std::size_t failures = 0;
  for (std::size_t i = 0; i < temperatures.size(); ++i) {
    InferencePath path;
    path.path_index = static_cast<int>(i);
    path.temperature = temperatures[i];

    CompletionRequest request;
    request.bundle = bundle;
    request.temperature = temperatures[i];
    request.model_id = options.model_rotation.empty()
                           ? options.model_id
                           : options.model_rotation[i % options.model_rotation.size()];
    request.max_tokens = options.max_tokens;
    try {
      path.completion = backend.complete(request);
      path.extracted = extract_label(path.completion.text, classes);
    } catch (const Error& ex) {
      path.error = ex.what();
      ++failures;
    }
    paths.push_back(std::move(path));
  }
  if (failures == temperatures.size()) {
    throw Error("run_multi_path: all " + std::to_string(failures) + " paths failed; last: " +
                paths.back().error.value_or("?"));
  }
  return paths;
}

Prediction majority_vote(std::vector<InferencePath> paths) {
  Prediction prediction;
  for (const auto& path : paths) {
    if (path.extracted) ++prediction.tally[*path.extracted];
  }
  if (prediction.tally.empty()) throw Error("majority_vote: zero parsed paths");

  int best_count = 0;
  for (const auto& [_, count] : prediction.tally) best_count = std::max(best_count, count);

  int tied = 0;
  for (const auto& [_, count] : prediction.tally) {
    if (count == best_count) ++tied;
  }
  prediction.tie_broken = tied > 1;

  // Among tied labels, the producer with the lowest (temperature, path_index).
  const InferencePath* winner = nullptr;
  for (const auto& path : paths) {
    if (!path.extracted || prediction.tally[*path.extracted] != best_count) continue;
    if (!winner || path.temperature < winner->temperature ||
        (path.temperature == winner->temperature && path.path_index < winner->path_index)) {
      winner = &path;
    }
  }
  prediction.final_label = *winner->extracted;
  prediction.paths = std::move(paths);
  return prediction;
}

Classifier::Classifier(const Dataset& dataset, const RunConfig& config, Backend& backend)
    : dataset_(dataset), config_(config), backend_(backend) {
  config_.validate();
  stats_ = channel_stats(dataset_.train);

  switch (config_.metric) {
    case MetricKind::Euclidean: metric_ = DistanceMetric::euclidean(); break;
    case MetricKind::Manhattan: metric_ = DistanceMetric::manhattan(); break;
    case MetricKind::StdEuclidean: metric_ = DistanceMetric::std_euclidean(stats_); break;
    case MetricKind::Dtw: metric_ = DistanceMetric::dtw(config_.dtw_window); break;
  }

  if (config_.n_neg > 0) {
    const std::size_t k = config_.neg_clusters > 0 ? config_.neg_clusters
                                                   : dataset_.classes.size();
    clusters_ = kmeans_fit(dataset_.train, std::min(k, dataset_.train.size()),
                           config_.neg_seed, 100,
                           config_.neg_raw_space ? nullptr : &stats_);
  }

  context_ = build_context(dataset_.card, dataset_);
  instruction_ = build_instruction(dataset_.classes);
  table_format_ = TableFormat{config_.format, config_.precision};
}

PromptBundle Classifier::build_bundle(const TimeSeriesSample& query) const {
  std::vector<ExampleBlock> blocks;

  std::vector<NeighborHit> positives;
  if (config_.k > 0) {
    positives = retrieve_neighbors(query, dataset_.train, *metric_, config_.k);
    int rank = 0;
    for (const auto& hit : positives) {
      const auto& sample = dataset_.train[static_cast<std::size_t>(hit.train_index)];
      blocks.push_back(make_example_block(
          hit, ExampleRole::Positive, ++rank,
          serialize(to_table(sample, dataset_.channel_names), table_format_)));
    }
  }

  if (config_.n_neg > 0) {
    const auto negatives = select_negatives(query, *clusters_, dataset_.train, config_.n_neg);
    int rank = 0;
    for (const auto& hit : negatives) {
      const auto& sample = dataset_.train[static_cast<std::size_t>(hit.train_index)];
      blocks.push_back(make_example_block(
          hit, ExampleRole::Negative, ++rank,
          serialize(to_table(sample, dataset_.channel_names), table_format_)));
    }
  }

  return assemble_prompt(context_, std::move(blocks),
                         serialize(to_table(query, dataset_.channel_names), table_format_),
                         instruction_, config_.magic_words);
}

Prediction Classifier::classify_sample(const TimeSeriesSample& query) const {
  PromptBundle bundle = build_bundle(query);

  std::string nn_label;
  if (!bundle.provenance.positives.empty()) {
    nn_label = bundle.provenance.positives.front().label;
  } else {
    nn_label = retrieve_neighbors(query, dataset_.train, *metric_, 1).front().label;
  }

  PathOptions options;
  options.model_id = config_.model;
  options.model_rotation = config_.ensemble_models;
  options.max_tokens = config_.max_tokens;
  auto paths =
      run_multi_path(bundle, config_.temperatures, backend_, dataset_.classes, options);

  Prediction prediction;
  const bool any_parsed =
      std::any_of(paths.begin(), paths.end(),
                  [](const InferencePath& p) { return p.extracted.has_value(); });
  if (any_parsed) {
    prediction = majority_vote(std::move(paths));
  } else {
    // Every path unparsed: recorded as-is, scored incorrect downstream.
    prediction.paths = std::move(paths);
  }
  prediction.provenance = bundle.provenance;
  prediction.nn_label = nn_label;
  prediction.prompt_hash = bundle.prompt_hash();
  if (config_.dump_prompts) prediction.rendered_prompt = bundle.rendered;
  return prediction;
}

Prediction classify_sample(const TimeSeriesSample& query, const Dataset& dataset,
                           const RunConfig& config, Backend& backend) {
  return Classifier(dataset, config, backend).classify_sample(query);
}

}  // namespace ttc
