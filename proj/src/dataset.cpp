#include "ttc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ttc/error.hpp"
#include "ttc/util.hpp"

namespace ttc {
namespace {

using ordered_json = nlohmann::ordered_json;

bool parse_bool(std::string_view value, const std::string& where) {
  if (iequals(value, "true")) return true;
  if (iequals(value, "false")) return false;
  throw ParseError(where + ": expected true|false, got '" + std::string(value) + "'");
}

std::size_t parse_size(std::string_view value, const std::string& where) {
  const double d = parse_double(value, where);
  if (d < 0 || d != std::floor(d)) {
    throw ParseError(where + ": expected a non-negative integer");
  }
  return static_cast<std::size_t>(d);
}

struct HeaderState {
  TsHeader header;
  bool saw_dimensions = false;
  bool saw_series_length = false;
  bool saw_class_label = false;
  bool saw_univariate = false;
};

void apply_directive(HeaderState& state, std::string_view line, const std::string& origin) {
  const std::size_t space = line.find_first_of(" \t");
  const std::string key = to_lower(line.substr(0, space));
  const std::string_view rest =
      space == std::string_view::npos ? std::string_view{} : trim(line.substr(space));
  const std::string where = origin + ": " + key;

  if (key == "@problemname") {
    if (rest.empty()) throw ParseError(where + ": missing value");
    state.header.problem_name = std::string(rest);
  } else if (key == "@timestamps") {
    state.header.timestamps = parse_bool(rest, where);
    if (state.header.timestamps) {
      throw ParseError(where + ": timestamped series are not supported");
    }
  } else if (key == "@missing") {
    state.header.missing = parse_bool(rest, where);
  } else if (key == "@univariate") {
    state.header.univariate = parse_bool(rest, where);
    state.saw_univariate = true;
  } else if (key == "@dimensions") {
    state.header.dimensions = parse_size(rest, where);
    state.saw_dimensions = true;
  } else if (key == "@equallength") {
    state.header.equal_length = parse_bool(rest, where);
    if (!state.header.equal_length) {
      throw ParseError(where + ": variable-length series are not supported");
    }
  } else if (key == "@serieslength") {
    state.header.series_length = parse_size(rest, where);
    state.saw_series_length = true;
  } else if (key == "@classlabel") {
    auto tokens = split(std::string(rest), ' ');
    tokens.erase(std::remove_if(tokens.begin(), tokens.end(),
                                [](const std::string& t) { return trim(t).empty(); }),
                 tokens.end());
    if (tokens.empty()) throw ParseError(where + ": missing value");
    if (!parse_bool(tokens.front(), where)) {
      throw ParseError(where + ": classification requires class labels");
    }
    if (tokens.size() < 2) throw ParseError(where + ": no class names declared");
    state.header.class_labels.assign(tokens.begin() + 1, tokens.end());
    state.saw_class_label = true;
  } else {
    throw ParseError(origin + ": unknown header directive '" + key + "'");
  }
}

TimeSeriesSample parse_data_line(std::string_view line, const TsHeader& header,
                                 int id, const std::string& origin) {
  const std::string where = origin + ": data line " + std::to_string(id);
  const auto fields = split(line, ':');
  if (fields.size() != header.dimensions + 1) {
    throw ParseError(where + ": expected " + std::to_string(header.dimensions) +
                     " dimensions plus a label, got " + std::to_string(fields.size()) +
                     " colon-separated fields");
  }

  TimeSeriesSample sample;
  sample.id = id;
  sample.label = std::string(trim(fields.back()));
  if (sample.label.empty()) throw ParseError(where + ": empty class label");
  if (std::find(header.class_labels.begin(), header.class_labels.end(), sample.label) ==
      header.class_labels.end()) {
    throw ParseError(where + ": unknown class label '" + sample.label + "'");
  }

  sample.values = Matrix(header.series_length, header.dimensions);
  for (std::size_t dim = 0; dim < header.dimensions; ++dim) {
    const auto tokens = split(fields[dim], ',');
    if (tokens.size() != header.series_length) {
      throw ParseError(where + ": dimension " + std::to_string(dim) + " has " +
                       std::to_string(tokens.size()) + " values, expected " +
                       std::to_string(header.series_length));
    }
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      const std::string_view token = trim(tokens[t]);
      if (token == "?") {
        throw ParseError(where + ": missing value token '?' is not supported");
      }
      sample.values(t, dim) = parse_double(token, where);
    }
  }
  return sample;
}

std::string placeholder_text(const std::string& what) {
  return "No " + what + " was provided for this dataset.";
}

}  // namespace

ParsedTs parse_ts_text(const std::string& text, const std::string& origin) {
  HeaderState state;
  ParsedTs out;
  bool in_data = false;
  int next_id = 0;

  std::istringstream stream(text);
  std::string raw;
  while (std::getline(stream, raw)) {
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (!in_data) {
      if (line.front() != '@') {
        throw ParseError(origin + ": expected header directive, got '" + std::string(line) + "'");
      }
      if (iequals(line, "@data")) {
        if (!state.saw_class_label) {
          throw ParseError(origin + ": @classLabel missing before @data");
        }
        if (state.saw_univariate && state.header.univariate) {
          if (state.saw_dimensions && state.header.dimensions != 1) {
            throw ParseError(origin + ": @univariate true conflicts with @dimensions");
          }
          state.header.dimensions = 1;
          state.saw_dimensions = true;
        }
        if (!state.saw_dimensions || state.header.dimensions == 0) {
          throw ParseError(origin + ": @dimensions missing or zero");
        }
        in_data = true;
        continue;
      }
      apply_directive(state, line, origin);
      continue;
    }

    // First data line pins the length when @seriesLength was absent.
    if (!state.saw_series_length) {
      const auto fields = split(line, ':');
      if (fields.size() < 2) {
        throw ParseError(origin + ": data line 0: no dimensions found");
      }
      state.header.series_length = split(fields[0], ',').size();
      state.saw_series_length = true;
    }
    if (state.header.series_length == 0) {
      throw ParseError(origin + ": series length must be at least 1");
    }
    out.samples.push_back(parse_data_line(line, state.header, next_id, origin));
    ++next_id;
  }

  if (!in_data) throw ParseError(origin + ": no @data section");
  out.header = state.header;
  return out;
}

ParsedTs parse_ts_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_ts_text(buffer.str(), path.filename().string());
}

std::string write_ts(const TsHeader& header, const std::vector<TimeSeriesSample>& samples) {
  std::string out;
  out += "@problemName " + header.problem_name + "\n";
  out += "@timeStamps false\n";
  out += "@missing false\n";
  out += std::string("@univariate ") + (header.dimensions == 1 ? "true" : "false") + "\n";
  out += "@dimensions " + std::to_string(header.dimensions) + "\n";
  out += "@equalLength true\n";
  out += "@seriesLength " + std::to_string(header.series_length) + "\n";
  out += "@classLabel true";
  for (const auto& c : header.class_labels) out += " " + c;
  out += "\n@data\n";
  for (const auto& sample : samples) {
    for (std::size_t dim = 0; dim < header.dimensions; ++dim) {
      for (std::size_t t = 0; t < header.series_length; ++t) {
        if (t > 0) out += ",";
        out += double_to_string(sample.values(t, dim));
      }
      out += ":";
    }
    out += sample.label + "\n";
  }
  return out;
}

DatasetCard parse_card_json(const std::string& text, const std::string& origin) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(origin + ": invalid JSON: " + ex.what());
  }
  if (!doc.is_object()) throw ParseError(origin + ": card must be a JSON object");

  DatasetCard card;
  for (const char* key : {"task_definition", "dataset_description"}) {
    if (!doc.contains(key) || !doc[key].is_string()) {
      throw ParseError(origin + ": missing string key '" + std::string(key) + "'");
    }
  }
  card.task_definition = doc["task_definition"].get<std::string>();
  card.dataset_description = doc["dataset_description"].get<std::string>();

  auto read_map = [&](const char* key,
                      std::vector<std::pair<std::string, std::string>>& out) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_object()) {
      throw ParseError(origin + ": '" + std::string(key) + "' must be an object");
    }
    for (const auto& item : doc[key].items()) {
      if (!item.value().is_string()) {
        throw ParseError(origin + ": '" + std::string(key) + "." + item.key() +
                         "' must be a string");
      }
      out.emplace_back(item.key(), item.value().get<std::string>());
    }
  };
  read_map("class_definitions", card.class_definitions);
  read_map("channel_descriptions", card.channel_descriptions);
  return card;
}

DatasetCard placeholder_card(const std::string& dataset_name) {
  DatasetCard card;
  card.task_definition =
      "Classify the multivariate time series from dataset '" + dataset_name +
      "' into exactly one of the listed classes.";
  card.dataset_description = placeholder_text("dataset description");
  return card;
}

Dataset load_dataset(const std::filesystem::path& dir, const std::string& name,
                     const LoadOptions& options) {
  ParsedTs train = parse_ts_file(dir / (name + "_TRAIN.ts"));
  ParsedTs test = parse_ts_file(dir / (name + "_TEST.ts"));

  const TsHeader& a = train.header;
  const TsHeader& b = test.header;
  if (a.dimensions != b.dimensions || a.series_length != b.series_length ||
      a.class_labels != b.class_labels) {
    throw ParseError(name + ": TRAIN/TEST header mismatch (dimensions, length, or class set)");
  }
  if (train.samples.empty()) throw ParseError(name + ": empty training split");

  Dataset ds;
  ds.name = name;
  ds.train = std::move(train.samples);
  ds.test = std::move(test.samples);
  ds.classes = a.class_labels;
  ds.series_length = a.series_length;

  const std::filesystem::path card_path =
      options.card_path.value_or(dir / (name + "_card.json"));
  if (std::filesystem::exists(card_path)) {
    std::ifstream in(card_path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    ds.card = parse_card_json(buffer.str(), card_path.filename().string());
  } else if (options.allow_missing_card) {
    ds.card = placeholder_card(name);
  } else {
    throw ParseError(name + ": dataset card not found at " + card_path.string() +
                     " (pass allow_missing_card to substitute placeholders)");
  }

  // Channel names come from the card; dim_0..dim_{m-1} when it omits them.
  if (!ds.card.channel_descriptions.empty()) {
    if (ds.card.channel_descriptions.size() != a.dimensions) {
      throw ParseError(name + ": card describes " +
                       std::to_string(ds.card.channel_descriptions.size()) +
                       " channels, dataset has " + std::to_string(a.dimensions));
    }
    for (const auto& [channel, _] : ds.card.channel_descriptions) {
      ds.channel_names.push_back(channel);
    }
  } else {
    for (std::size_t j = 0; j < a.dimensions; ++j) {
      const std::string channel = "dim_" + std::to_string(j);
      ds.channel_names.push_back(channel);
      ds.card.channel_descriptions.emplace_back(channel, placeholder_text("channel description"));
    }
  }

  // Class definitions must cover the declared class set exactly.
  if (ds.card.class_definitions.empty()) {
    for (const auto& c : ds.classes) {
      ds.card.class_definitions.emplace_back(c, placeholder_text("class definition"));
    }
  } else {
    std::set<std::string> defined;
    for (const auto& [cls, _] : ds.card.class_definitions) defined.insert(cls);
    for (const auto& cls : ds.classes) {
      if (!defined.count(cls)) {
        throw ParseError(name + ": card is missing a class definition for '" + cls + "'");
      }
    }
  }
  return ds;
}

ChannelStats channel_stats(const std::vector<TimeSeriesSample>& train) {
  if (train.empty()) throw Error("channel_stats: empty training split");
  const std::size_t m = train.front().channels();

  ChannelStats stats;
  stats.mean.assign(m, 0.0);
  stats.stddev.assign(m, 0.0);

  std::size_t count = 0;
  for (const auto& sample : train) {
    for (std::size_t t = 0; t < sample.length(); ++t) {
      for (std::size_t j = 0; j < m; ++j) stats.mean[j] += sample.values(t, j);
    }
    count += sample.length();
  }
  for (std::size_t j = 0; j < m; ++j) stats.mean[j] /= static_cast<double>(count);

  for (const auto& sample : train) {
    for (std::size_t t = 0; t < sample.length(); ++t) {
      for (std::size_t j = 0; j < m; ++j) {
        const double d = sample.values(t, j) - stats.mean[j];
        stats.stddev[j] += d * d;
      }
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    stats.stddev[j] = std::sqrt(stats.stddev[j] / static_cast<double>(count));
  }
  return stats;
}

}  // namespace ttc
