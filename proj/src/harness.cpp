#include "ttc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <fstream>
#include <future>
#include <set>

#include <nlohmann/json.hpp>

#include "ttc/error.hpp"
#include "ttc/util.hpp"

namespace ttc {
namespace {

using nlohmann::ordered_json;

ordered_json neighbor_to_json(const NeighborRecord& n) {
  return ordered_json{{"index", n.index}, {"distance", n.distance}, {"label", n.label}};
}

NeighborRecord neighbor_from_json(const ordered_json& j) {
  NeighborRecord n;
  n.index = j.at("index").get<int>();
  n.distance = j.at("distance").get<double>();
  n.label = j.at("label").get<std::string>();
  return n;
}

SampleRecord make_record(int id, const TimeSeriesSample& sample, const Prediction& pred,
                         std::int64_t timing_ms) {
  SampleRecord record;
  record.id = id;
  record.true_label = sample.label;
  record.predicted = pred.final_label.value_or(kUnparsed);
  for (const auto& path : pred.paths) {
    record.paths.push_back({path.path_index, path.temperature,
                            path.extracted.value_or(kUnparsed), path.error});
  }
  for (const auto& hit : pred.provenance.positives) {
    record.neighbors.push_back({hit.train_index, hit.distance, hit.label});
  }
  for (const auto& hit : pred.provenance.negatives) {
    record.negatives.push_back({hit.train_index, hit.distance, hit.label});
  }
  record.nn_label = pred.nn_label;
  record.prompt_hash = pred.prompt_hash;
  record.tie_broken = pred.tie_broken;
  record.timing_ms = timing_ms;
  return record;
}

// Longest valid contiguous id prefix of an existing records file. A torn or
// out-of-order tail is dropped (the file is rewritten when that happens).
std::vector<SampleRecord> load_resume_prefix(const std::filesystem::path& path) {
  std::vector<SampleRecord> records;
  std::ifstream in(path, std::ios::binary);
  if (!in) return records;
  std::string line;
  bool clean = true;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    try {
      SampleRecord record = record_from_json_line(line);
      if (record.id != static_cast<int>(records.size())) {
        clean = false;
        break;
      }
      records.push_back(std::move(record));
    } catch (const Error&) {
      clean = false;
      break;
    }
  }
  in.close();
  if (!clean) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    for (const auto& record : records) out << record_to_json_line(record) << "\n";
  }
  return records;
}

}  // namespace

std::string record_to_json_line(const SampleRecord& record) {
  ordered_json j;
  j["schema"] = 1;
  j["id"] = record.id;
  j["true_label"] = record.true_label;
  j["predicted"] = record.predicted;
  ordered_json paths = ordered_json::array();
  for (const auto& path : record.paths) {
    ordered_json p{{"path_index", path.path_index},
                   {"temperature", path.temperature},
                   {"extracted", path.extracted}};
    if (path.error) p["error"] = *path.error;
    paths.push_back(std::move(p));
  }
  j["paths"] = std::move(paths);
  ordered_json neighbors = ordered_json::array();
  for (const auto& n : record.neighbors) neighbors.push_back(neighbor_to_json(n));
  j["neighbors"] = std::move(neighbors);
  ordered_json negatives = ordered_json::array();
  for (const auto& n : record.negatives) negatives.push_back(neighbor_to_json(n));
  j["negatives"] = std::move(negatives);
  j["nn_label"] = record.nn_label;
  j["prompt_hash"] = record.prompt_hash;
  j["tie_broken"] = record.tie_broken;
  j["timing_ms"] = record.timing_ms;
  return j.dump();
}

SampleRecord record_from_json_line(const std::string& line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("record line: ") + ex.what());
  }
  try {
    if (j.at("schema").get<int>() != 1) {
      throw ParseError("record line: unsupported schema version");
    }
    SampleRecord record;
    record.id = j.at("id").get<int>();
    record.true_label = j.at("true_label").get<std::string>();
    record.predicted = j.at("predicted").get<std::string>();
    for (const auto& p : j.at("paths")) {
      PathRecord path;
      path.path_index = p.at("path_index").get<int>();
      path.temperature = p.at("temperature").get<double>();
      path.extracted = p.at("extracted").get<std::string>();
      if (p.contains("error")) path.error = p.at("error").get<std::string>();
      record.paths.push_back(std::move(path));
    }
    for (const auto& n : j.at("neighbors")) record.neighbors.push_back(neighbor_from_json(n));
    for (const auto& n : j.at("negatives")) record.negatives.push_back(neighbor_from_json(n));
    record.nn_label = j.at("nn_label").get<std::string>();
    record.prompt_hash = j.at("prompt_hash").get<std::string>();
    record.tie_broken = j.at("tie_broken").get<bool>();
    record.timing_ms = j.at("timing_ms").get<std::int64_t>();
    return record;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("record line: ") + ex.what());
  }
}

double ConsistencyTable::agree_correct_rate() const {
  const std::size_t row = agree_correct + agree_incorrect;
  return row == 0 ? 0.0 : static_cast<double>(agree_correct) / static_cast<double>(row);
}

double ConsistencyTable::disagree_correct_rate() const {
  const std::size_t row = disagree_correct + disagree_incorrect;
  return row == 0 ? 0.0 : static_cast<double>(disagree_correct) / static_cast<double>(row);
}

std::map<std::string, ClassScore> per_class_scores(const std::vector<SampleRecord>& records,
                                                   const std::vector<std::string>& classes) {
  std::map<std::string, ClassScore> scores;
  for (const auto& cls : classes) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (const auto& record : records) {
      const bool truth = record.true_label == cls;
      const bool predicted = record.predicted == cls;
      if (truth && predicted) ++tp;
      if (!truth && predicted) ++fp;
      if (truth && !predicted) ++fn;
    }
    ClassScore s;
    s.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    s.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    s.f1 = s.precision + s.recall == 0.0
               ? 0.0
               : 2.0 * s.precision * s.recall / (s.precision + s.recall);
    scores[cls] = s;
  }
  return scores;
}

double macro_f1(const std::vector<SampleRecord>& records,
                const std::vector<std::string>& classes) {
  if (records.empty()) throw Error("macro_f1: no records");
  if (classes.empty()) throw Error("macro_f1: no classes");
  const auto scores = per_class_scores(records, classes);
  double sum = 0.0;
  for (const auto& [_, s] : scores) sum += s.f1;
  return sum / static_cast<double>(classes.size());
}

ConsistencyTable consistency_breakdown(const std::vector<SampleRecord>& records) {
  ConsistencyTable table;
  for (const auto& record : records) {
    const bool agree = record.predicted == record.nn_label;
    const bool correct = record.correct();
    if (agree && correct) ++table.agree_correct;
    if (agree && !correct) ++table.agree_incorrect;
    if (!agree && correct) ++table.disagree_correct;
    if (!agree && !correct) ++table.disagree_incorrect;
  }
  return table;
}

std::map<std::string, double> mean_ranks(
    const std::map<std::string, std::map<std::string, double>>& accuracies) {
  if (accuracies.empty()) throw Error("mean_ranks: no methods");

  std::set<std::string> datasets;
  for (const auto& [name, acc] : accuracies.begin()->second) {
    (void)acc;
    datasets.insert(name);
  }
  for (const auto& [method, per_dataset] : accuracies) {
    std::set<std::string> own;
    for (const auto& [name, acc] : per_dataset) {
      (void)acc;
      own.insert(name);
    }
    if (own != datasets) {
      throw Error("mean_ranks: method '" + method + "' covers a different dataset set");
    }
  }
  if (datasets.empty()) throw Error("mean_ranks: no datasets");

  std::map<std::string, double> totals;
  for (const auto& dataset : datasets) {
    std::vector<std::pair<double, std::string>> scored;
    for (const auto& [method, per_dataset] : accuracies) {
      scored.emplace_back(per_dataset.at(dataset), method);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    std::size_t i = 0;
    while (i < scored.size()) {
      std::size_t j = i;
      while (j < scored.size() && scored[j].first == scored[i].first) ++j;
      // positions i..j-1 share the average rank (1-based)
      const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
      for (std::size_t p = i; p < j; ++p) totals[scored[p].second] += rank;
      i = j;
    }
  }
  for (auto& [_, total] : totals) total /= static_cast<double>(datasets.size());
  return totals;
}

EvalReport compute_report(const std::vector<SampleRecord>& records,
                          const std::vector<std::string>& classes) {
  EvalReport report;
  report.samples = records.size();
  if (records.empty()) return report;

  std::size_t correct = 0;
  for (const auto& record : records) {
    if (record.correct()) ++correct;
    if (record.predicted == kUnparsed) ++report.unparsed;
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(records.size());
  report.per_class = per_class_scores(records, classes);
  report.macro_f1 = macro_f1(records, classes);
  report.consistency = consistency_breakdown(records);
  return report;
}

std::string EvalReport::to_json() const {
  ordered_json j;
  j["schema"] = 1;
  j["dataset"] = dataset;
  j["config_hash"] = config_hash;
  j["samples"] = samples;
  j["accuracy"] = accuracy;
  j["macro_f1"] = macro_f1;
  ordered_json classes = ordered_json::object();
  for (const auto& [cls, s] : per_class) {
    classes[cls] = {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
  }
  j["per_class"] = std::move(classes);
  j["consistency"] = {{"agree_correct", consistency.agree_correct},
                      {"agree_incorrect", consistency.agree_incorrect},
                      {"disagree_correct", consistency.disagree_correct},
                      {"disagree_incorrect", consistency.disagree_incorrect},
                      {"agree_correct_rate", consistency.agree_correct_rate()},
                      {"disagree_correct_rate", consistency.disagree_correct_rate()}};
  j["unparsed"] = unparsed;
  return j.dump(2);
}

RunResult run_experiment(const RunConfig& config, const Dataset& dataset, Backend& backend) {
  config.validate();
  if (dataset.test.empty()) throw Error("run_experiment: empty test split");

  RunResult result;
  result.run_dir = std::filesystem::path(config.out_dir) / dataset.name /
                   config.config_hash();
  std::filesystem::create_directories(result.run_dir);
  const auto records_path = result.run_dir / "records.jsonl";

  if (config.resume) {
    result.records = load_resume_prefix(records_path);
    if (result.records.size() > dataset.test.size()) {
      throw Error("run_experiment: existing records outnumber the test split");
    }
  } else {
    std::ofstream truncate(records_path, std::ios::binary | std::ios::trunc);
  }

  const Classifier classifier(dataset, config, backend);
  if (config.dump_prompts) std::filesystem::create_directories(result.run_dir / "prompts");

  std::ofstream out(records_path, std::ios::binary | std::ios::app);
  if (!out) throw Error("run_experiment: cannot open " + records_path.string());

  auto evaluate = [&](std::size_t id) {
    const auto started = std::chrono::steady_clock::now();
    const auto& sample = dataset.test[id];
    Prediction pred = classifier.classify_sample(sample);
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);
    if (config.dump_prompts) {
      std::ofstream prompt_out(result.run_dir / "prompts" /
                               (std::to_string(id) + ".txt"));
      prompt_out << pred.rendered_prompt;
    }
    return make_record(static_cast<int>(id), sample, pred, elapsed.count());
  };

  // Bounded look-ahead; completions are consumed and written strictly in id
  // order so the records file stays deterministic and resumable.
  const std::size_t start = result.records.size();
  const std::size_t window_size = static_cast<std::size_t>(config.parallelism);
  std::deque<std::future<SampleRecord>> window;
  std::size_t next_launch = start;

  for (std::size_t id = start; id < dataset.test.size(); ++id) {
    while (window.size() < window_size && next_launch < dataset.test.size()) {
      window.push_back(std::async(std::launch::async, evaluate, next_launch));
      ++next_launch;
    }
    SampleRecord record = window.front().get();
    window.pop_front();
    out << record_to_json_line(record) << "\n";
    out.flush();
    result.records.push_back(std::move(record));
  }

  result.report = compute_report(result.records, dataset.classes);
  result.report.dataset = dataset.name;
  result.report.config_hash = config.config_hash();
  std::ofstream report_out(result.run_dir / "report.json", std::ios::binary | std::ios::trunc);
  report_out << result.report.to_json() << "\n";
  return result;
}

}  // namespace ttc
