#include "ttc/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ttc/backend.hpp"
#include "ttc/ensemble.hpp"
#include "ttc/error.hpp"
#include "ttc/harness.hpp"
#include "ttc/table.hpp"
#include "ttc/util.hpp"

namespace ttc::cli {
namespace {

using nlohmann::json;

std::vector<double> parse_temps(const std::string& spec) {
  std::vector<double> temps;
  for (const auto& token : split(spec, ',')) {
    temps.push_back(parse_double(token, "--temps"));
  }
  return temps;
}

json load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& ex) {
    throw ConfigError("config file " + path + ": " + ex.what());
  }
  if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
  return doc;
}

template <typename T>
std::optional<T> config_get(const json& doc, const std::string& dotted_key) {
  const json* node = &doc;
  for (const auto& part : split(dotted_key, '.')) {
    if (!node->is_object() || !node->contains(part)) return std::nullopt;
    node = &(*node)[part];
  }
  try {
    return node->get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + dotted_key + "' has the wrong type");
  }
}

std::optional<std::string> env_value(const char* name) {
  if (const char* value = std::getenv(name); value && *value) return std::string(value);
  return std::nullopt;
}

struct SampleSelector {
  int sample = 0;
  std::string split = "test";
};

const TimeSeriesSample& pick_sample(const Dataset& dataset, const SampleSelector& sel) {
  const auto& pool = sel.split == "train" ? dataset.train : dataset.test;
  if (sel.split != "train" && sel.split != "test") {
    throw ConfigError("--split must be train or test");
  }
  if (sel.sample < 0 || static_cast<std::size_t>(sel.sample) >= pool.size()) {
    throw ConfigError("--sample " + std::to_string(sel.sample) + " out of range (split has " +
                      std::to_string(pool.size()) + " samples)");
  }
  return pool[static_cast<std::size_t>(sel.sample)];
}

void add_common_options(CLI::App* cmd, RawOptions& raw) {
  cmd->add_option("--config", raw.config_path, "JSON config file (see footer for keys)");
  cmd->add_option("--dataset", raw.dataset, "dataset name or abbreviation [config key: dataset]");
  cmd->add_option("--data-dir", raw.data_dir,
                  "directory holding <dataset>/ subdirectories [config key: data_dir]");
  cmd->add_option("--metric", raw.metric,
                  "retrieval metric: ed|sed|man|dtw [config key: metric]");
  cmd->add_option("--dtw-window", raw.dtw_window,
                  "Sakoe-Chiba radius; omit for unconstrained [config key: dtw_window]");
  cmd->add_option("--k", raw.k, "number of retrieved neighbors [config key: k]");
  cmd->add_option("--negatives", raw.negatives,
                  "contrastive negatives per query [config keys: negatives.count, "
                  "negatives.k_clusters, negatives.seed, negatives.raw_space]");
  cmd->add_option("--format", raw.format,
                  "table format: dfloader|markdown|json|html [config key: format]");
  cmd->add_option("--precision", raw.precision,
                  "float decimal places before trimming [config key: precision]");
  cmd->add_option("--temps", raw.temps,
                  "comma-separated ensemble temperatures [config key: ensemble.temperatures]");
  cmd->add_option("--backend", raw.backend,
                  "completion backend: mock|http [config keys: backend, api_url, api_key; "
                  "ensemble.backends lists model ids for multi-model voting]");
  cmd->add_option("--model", raw.model, "model id for the http backend [config key: model]");
  cmd->add_option("--seed", raw.seed, "run seed [config key: seed]");
  cmd->add_option("--parallelism", raw.parallelism,
                  "worker pool size [config key: parallelism]");
  cmd->add_option("--max-tokens", raw.max_tokens,
                  "completion token cap [config key: max_tokens]");
  cmd->add_option("--out", raw.out, "results directory [config key: out]");
  cmd->add_flag("--magic-words", raw.magic_words,
                "append the incentive sentence [config key: magic_words]");
  cmd->add_flag("--znorm", raw.znorm,
                "z-normalize all series before the pipeline [config key: znorm]");
  cmd->add_flag("--resume", raw.resume,
                "continue an interrupted run [config key: resume]");
  cmd->add_flag("--allow-missing-card", raw.allow_missing_card,
                "substitute placeholder context when the dataset card is absent "
                "[config key: allow_missing_card]");
  cmd->add_flag("--dump-prompts", raw.dump_prompts,
                "write every rendered prompt under the run directory "
                "[config key: dump_prompts]");
}

std::string keys_footer() {
  std::string footer = "Config file keys:";
  for (const auto& key : config_file_keys()) footer += " " + key;
  return footer;
}

int cmd_classify(const RawOptions& raw) {
  RunConfig config = resolve_run_config(raw);
  config.validate();
  Dataset dataset = load_dataset_for(config);

  HttpBackendConfig http;
  http.url = config.api_url;
  http.api_key = config.api_key;
  http.model_id = config.model;
  auto backend = make_backend(config.backend, dataset.classes, http);

  const RunResult result = run_experiment(config, dataset, *backend);
  std::cout << "dataset: " << dataset.name << " (" << result.report.samples
            << " test samples)\n"
            << "backend: " << backend->id() << "\n"
            << "accuracy: " << double_to_string(result.report.accuracy) << "\n"
            << "macro_f1: " << double_to_string(result.report.macro_f1) << "\n"
            << "unparsed: " << result.report.unparsed << "\n"
            << "records: " << (result.run_dir / "records.jsonl").string() << "\n";
  return 0;
}

int cmd_encode(const RawOptions& raw, const SampleSelector& sel,
               const std::string& format_spec) {
  RunConfig config = resolve_run_config(raw);
  Dataset dataset = load_dataset_for(config);
  const TimeSeriesSample& sample = pick_sample(dataset, sel);

  std::vector<TableFormatKind> kinds;
  if (format_spec == "all") {
    kinds = {TableFormatKind::DFLoader, TableFormatKind::Markdown, TableFormatKind::Json,
             TableFormatKind::Html};
  } else if (!format_spec.empty()) {
    kinds = {parse_format_kind(format_spec)};
  } else {
    kinds = {config.format};
  }

  const TableDocument table = to_table(sample, dataset.channel_names);
  std::string token_line = "tokens:";
  for (const auto kind : kinds) {
    const TableFormat format{kind, config.precision};
    const std::string text = serialize(table, format);
    if (kinds.size() > 1) std::cout << "--- format: " << format_kind_name(kind) << " ---\n";
    std::cout << text << "\n";
    token_line += " " + format_kind_name(kind) + "=" + std::to_string(estimate_tokens(text));
  }
  std::cout << token_line << "\n";
  return 0;
}

int cmd_dump_prompt(const RawOptions& raw, const SampleSelector& sel,
                    const std::string& out_path) {
  RunConfig config = resolve_run_config(raw);
  config.validate();
  Dataset dataset = load_dataset_for(config);
  const TimeSeriesSample& sample = pick_sample(dataset, sel);

  // Prompt assembly never touches a backend; the mock stands in structurally.
  MockBackend backend(dataset.classes);
  const Classifier classifier(dataset, config, backend);
  const PromptBundle bundle = classifier.build_bundle(sample);

  if (out_path.empty()) {
    std::cout << bundle.rendered << "\n";
  } else {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + out_path);
    out << bundle.rendered;
    std::cout << "prompt: " << out_path << " (hash " << bundle.prompt_hash() << ")\n";
  }
  return 0;
}

}  // namespace

const std::vector<std::string>& config_file_keys() {
  static const std::vector<std::string> keys = {
      "dataset",          "data_dir",          "metric",
      "dtw_window",       "k",                 "format",
      "precision",        "backend",           "model",
      "api_url",          "api_key",           "magic_words",
      "znorm",            "seed",              "parallelism",
      "max_tokens",       "out",               "resume",
      "allow_missing_card", "dump_prompts",
      "negatives.count",  "negatives.k_clusters", "negatives.seed",
      "negatives.raw_space", "ensemble.temperatures", "ensemble.backends",
  };
  return keys;
}

RunConfig resolve_run_config(const RawOptions& raw) {
  json file = json::object();
  if (raw.config_path) file = load_config_file(*raw.config_path);

  RunConfig config;

  // Dataset name first: the profile depends on it.
  if (auto v = config_get<std::string>(file, "dataset")) config.dataset = *v;
  if (raw.dataset) config.dataset = *raw.dataset;
  if (config.dataset.empty()) throw ConfigError("no dataset given (--dataset or config)");

  if (const auto profile = dataset_profile(config.dataset)) {
    config.metric = profile->metric;
    config.k = profile->k;
    config.format = profile->format;
  }

  // Config file over profile.
  if (auto v = config_get<std::string>(file, "data_dir")) config.data_dir = *v;
  if (auto v = config_get<std::string>(file, "metric")) config.metric = parse_metric_kind(*v);
  if (auto v = config_get<std::int64_t>(file, "dtw_window")) {
    if (*v < 0) throw ConfigError("dtw_window must be non-negative");
    config.dtw_window = static_cast<std::size_t>(*v);
  }
  if (auto v = config_get<std::int64_t>(file, "k")) {
    if (*v < 0) throw ConfigError("k must be non-negative");
    config.k = static_cast<std::size_t>(*v);
  }
  if (auto v = config_get<std::string>(file, "format")) config.format = parse_format_kind(*v);
  if (auto v = config_get<int>(file, "precision")) config.precision = *v;
  if (auto v = config_get<std::string>(file, "backend")) config.backend = *v;
  if (auto v = config_get<std::string>(file, "model")) config.model = *v;
  if (auto v = config_get<std::string>(file, "api_url")) config.api_url = *v;
  if (auto v = config_get<std::string>(file, "api_key")) config.api_key = *v;
  if (auto v = config_get<bool>(file, "magic_words")) config.magic_words = *v;
  if (auto v = config_get<bool>(file, "znorm")) config.znorm = *v;
  if (auto v = config_get<std::uint64_t>(file, "seed")) config.seed = *v;
  if (auto v = config_get<int>(file, "parallelism")) config.parallelism = *v;
  if (auto v = config_get<int>(file, "max_tokens")) config.max_tokens = *v;
  if (auto v = config_get<std::string>(file, "out")) config.out_dir = *v;
  if (auto v = config_get<bool>(file, "resume")) config.resume = *v;
  if (auto v = config_get<bool>(file, "allow_missing_card")) config.allow_missing_card = *v;
  if (auto v = config_get<bool>(file, "dump_prompts")) config.dump_prompts = *v;
  if (auto v = config_get<std::int64_t>(file, "negatives.count")) {
    if (*v < 0) throw ConfigError("negatives.count must be non-negative");
    config.n_neg = static_cast<std::size_t>(*v);
  }
  if (auto v = config_get<std::int64_t>(file, "negatives.k_clusters")) {
    if (*v < 0) throw ConfigError("negatives.k_clusters must be non-negative");
    config.neg_clusters = static_cast<std::size_t>(*v);
  }
  if (auto v = config_get<std::uint64_t>(file, "negatives.seed")) config.neg_seed = *v;
  if (auto v = config_get<bool>(file, "negatives.raw_space")) config.neg_raw_space = *v;
  if (auto v = config_get<std::vector<double>>(file, "ensemble.temperatures")) {
    config.temperatures = *v;
  }
  if (auto v = config_get<std::vector<std::string>>(file, "ensemble.backends")) {
    config.ensemble_models = *v;
  }

  // Environment over the config file.
  if (auto v = env_value("TT_API_URL")) config.api_url = *v;
  if (auto v = env_value("TT_API_KEY")) config.api_key = *v;
  if (auto v = env_value("TT_MODEL")) config.model = *v;

  // Flags over everything.
  if (raw.data_dir) config.data_dir = *raw.data_dir;
  if (raw.metric) config.metric = parse_metric_kind(*raw.metric);
  if (raw.dtw_window) {
    if (*raw.dtw_window < 0) throw ConfigError("--dtw-window must be non-negative");
    config.dtw_window = static_cast<std::size_t>(*raw.dtw_window);
  }
  if (raw.k) {
    if (*raw.k < 0) throw ConfigError("--k must be non-negative");
    config.k = static_cast<std::size_t>(*raw.k);
  }
  if (raw.negatives) {
    if (*raw.negatives < 0) throw ConfigError("--negatives must be non-negative");
    config.n_neg = static_cast<std::size_t>(*raw.negatives);
  }
  if (raw.format) config.format = parse_format_kind(*raw.format);
  if (raw.precision) config.precision = *raw.precision;
  if (raw.temps) config.temperatures = parse_temps(*raw.temps);
  if (raw.backend) config.backend = *raw.backend;
  if (raw.model) config.model = *raw.model;
  if (raw.seed) config.seed = *raw.seed;
  if (raw.parallelism) config.parallelism = *raw.parallelism;
  if (raw.max_tokens) config.max_tokens = *raw.max_tokens;
  if (raw.out) config.out_dir = *raw.out;
  if (raw.magic_words) config.magic_words = true;
  if (raw.znorm) config.znorm = true;
  if (raw.resume) config.resume = true;
  if (raw.allow_missing_card) config.allow_missing_card = true;
  if (raw.dump_prompts) config.dump_prompts = true;
  return config;
}

std::pair<std::filesystem::path, std::string> resolve_dataset_dir(
    const std::string& data_dir, const std::string& name) {
  std::vector<std::string> candidates = {name};
  if (const auto full = full_dataset_name(name); full && *full != name) {
    candidates.push_back(*full);
  }
  for (const auto& candidate : candidates) {
    const std::filesystem::path dir = std::filesystem::path(data_dir) / candidate;
    if (std::filesystem::exists(dir / (candidate + "_TRAIN.ts"))) return {dir, candidate};
  }
  std::string attempts;
  for (const auto& candidate : candidates) {
    attempts += (attempts.empty() ? "" : ", ") +
                (std::filesystem::path(data_dir) / candidate).string();
  }
  throw ConfigError("dataset '" + name + "' not found (looked in: " + attempts + ")");
}

Dataset load_dataset_for(const RunConfig& config) {
  const auto [dir, resolved] = resolve_dataset_dir(config.data_dir, config.dataset);
  LoadOptions options;
  options.allow_missing_card = config.allow_missing_card;
  Dataset dataset = load_dataset(dir, resolved, options);
  dataset.name = config.dataset;  // keep the user's spelling in outputs

  if (config.znorm) {
    const ChannelStats stats = channel_stats(dataset.train);
    auto normalize = [&](std::vector<TimeSeriesSample>& split) {
      for (auto& sample : split) {
        for (std::size_t t = 0; t < sample.length(); ++t) {
          for (std::size_t j = 0; j < sample.channels(); ++j) {
            sample.values(t, j) = (sample.values(t, j) - stats.mean[j]) /
                                  std::max(stats.stddev[j], kStdFloor);
          }
        }
      }
    };
    normalize(dataset.train);
    normalize(dataset.test);
  }
  return dataset;
}

std::string help_text() {
  CLI::App app("zero-shot multivariate time-series classification via LLM table prompts",
               "ttc");
  app.footer(keys_footer());
  RawOptions raw;
  SampleSelector sel;
  std::string format_spec;
  std::string out_path;
  auto* classify = app.add_subcommand("classify", "classify the test split and report metrics");
  add_common_options(classify, raw);
  auto* encode = app.add_subcommand("encode", "serialize one sample as a table");
  add_common_options(encode, raw);
  encode->add_option("--sample", sel.sample, "sample index within the split");
  encode->add_option("--split", sel.split, "train or test (default test)");
  auto* dump = app.add_subcommand("dump-prompt", "render a prompt without calling a backend");
  add_common_options(dump, raw);
  dump->add_option("--sample", sel.sample, "sample index within the split");
  dump->add_option("--split", sel.split, "train or test (default test)");
  dump->add_option("--prompt-out", out_path, "write the prompt here instead of stdout");
  (void)format_spec;
  return app.help("", CLI::AppFormatMode::All);
}

int run(int argc, const char* const* argv) {
  CLI::App app("zero-shot multivariate time-series classification via LLM table prompts",
               "ttc");
  app.footer(keys_footer());
  app.require_subcommand(1);

  RawOptions raw;
  SampleSelector sel;
  std::string format_spec;
  std::string out_path;

  auto* classify = app.add_subcommand("classify", "classify the test split and report metrics");
  add_common_options(classify, raw);

  auto* encode = app.add_subcommand("encode", "serialize one sample as a table");
  add_common_options(encode, raw);
  encode->add_option("--sample", sel.sample, "sample index within the split");
  encode->add_option("--split", sel.split, "train or test (default test)");

  auto* dump = app.add_subcommand("dump-prompt", "render a prompt without calling a backend");
  add_common_options(dump, raw);
  dump->add_option("--sample", sel.sample, "sample index within the split");
  dump->add_option("--split", sel.split, "train or test (default test)");
  dump->add_option("--prompt-out", out_path, "write the prompt here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    return app.exit(ex);
  }

  try {
    if (classify->parsed()) return cmd_classify(raw);
    if (encode->parsed()) {
      // encode treats --format specially: "all" fans out over every grammar.
      if (raw.format && *raw.format == "all") {
        format_spec = "all";
        raw.format.reset();
      } else if (raw.format) {
        format_spec = *raw.format;
      }
      return cmd_encode(raw, sel, format_spec);
    }
    if (dump->parsed()) return cmd_dump_prompt(raw, sel, out_path);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace ttc::cli
