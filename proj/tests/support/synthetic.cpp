#include "support/synthetic.hpp"

#include <cmath>
#include <fstream>

#include "ttc/error.hpp"
#include "ttc/rng.hpp"

namespace ttc::testing {
namespace {

constexpr double kTau = 6.283185307179586476925286766559;

TimeSeriesSample make_sample(int id, std::size_t cls, const ShapeSpec& spec, Rng& rng) {
  TimeSeriesSample sample;
  sample.id = id;
  sample.label = "c" + std::to_string(cls);
  sample.values = Matrix(spec.length, spec.channels);

  const double freq = 1.0 + static_cast<double>(cls % 5);
  const double offset = 0.5 * static_cast<double>(cls / 5);
  for (std::size_t j = 0; j < spec.channels; ++j) {
    const double phase = kTau * static_cast<double>(j) / static_cast<double>(spec.channels + 1);
    const double amplitude = 0.8 + 0.2 * static_cast<double>(j % 3);
    for (std::size_t t = 0; t < spec.length; ++t) {
      const double angle = kTau * freq * static_cast<double>(t) /
                           static_cast<double>(spec.length) + phase;
      sample.values(t, j) = offset + amplitude * std::sin(angle) + 0.3 * rng.normal();
    }
  }
  return sample;
}

std::vector<TimeSeriesSample> make_split(std::size_t count, const ShapeSpec& spec, Rng& rng) {
  std::vector<TimeSeriesSample> split;
  split.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    split.push_back(make_sample(static_cast<int>(i), i % spec.classes, spec, rng));
  }
  return split;
}

}  // namespace

const std::vector<ShapeSpec>& benchmark_shapes() {
  static const std::vector<ShapeSpec> shapes = {
      {"AWR", 275, 300, 9, 144, 25}, {"AF", 15, 15, 2, 640, 3},
      {"BL", 500, 450, 4, 510, 2},   {"CR", 108, 72, 6, 1197, 12},
      {"ER", 30, 270, 4, 65, 6},     {"FM", 316, 100, 28, 50, 2},
      {"RS", 152, 152, 6, 30, 4},    {"SRS2", 200, 180, 7, 1152, 2},
      {"SWJ", 12, 15, 4, 2500, 3},   {"UWG", 120, 320, 3, 315, 8},
  };
  return shapes;
}

ShapeSpec shape_of(const std::string& name) {
  for (const auto& shape : benchmark_shapes()) {
    if (shape.name == name) return shape;
  }
  throw Error("no benchmark shape named " + name);
}

Dataset make_synthetic_dataset(const ShapeSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  Dataset ds;
  ds.name = spec.name;
  ds.series_length = spec.length;
  for (std::size_t c = 0; c < spec.classes; ++c) ds.classes.push_back("c" + std::to_string(c));
  for (std::size_t j = 0; j < spec.channels; ++j) {
    ds.channel_names.push_back("dim_" + std::to_string(j));
  }
  ds.train = make_split(spec.train_size, spec, rng);
  ds.test = make_split(spec.test_size, spec, rng);

  ds.card = placeholder_card(spec.name);
  for (const auto& cls : ds.classes) {
    ds.card.class_definitions.emplace_back(cls, "Synthetic class " + cls + ".");
  }
  for (const auto& channel : ds.channel_names) {
    ds.card.channel_descriptions.emplace_back(channel, "Synthetic channel " + channel + ".");
  }
  return ds;
}

void write_dataset_dir(const Dataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  TsHeader header;
  header.problem_name = dataset.name;
  header.dimensions = dataset.channels();
  header.series_length = dataset.series_length;
  header.class_labels = dataset.classes;

  std::ofstream(dir / (dataset.name + "_TRAIN.ts"), std::ios::binary)
      << write_ts(header, dataset.train);
  std::ofstream(dir / (dataset.name + "_TEST.ts"), std::ios::binary)
      << write_ts(header, dataset.test);

  std::string card = "{\n  \"task_definition\": \"Classify the synthetic series.\",\n"
                     "  \"dataset_description\": \"Deterministic synthetic fixture.\",\n"
                     "  \"class_definitions\": {";
  for (std::size_t i = 0; i < dataset.classes.size(); ++i) {
    if (i > 0) card += ",";
    card += "\n    \"" + dataset.classes[i] + "\": \"Synthetic class.\"";
  }
  card += "\n  },\n  \"channel_descriptions\": {";
  for (std::size_t i = 0; i < dataset.channel_names.size(); ++i) {
    if (i > 0) card += ",";
    card += "\n    \"" + dataset.channel_names[i] + "\": \"Synthetic channel.\"";
  }
  card += "\n  }\n}\n";
  std::ofstream(dir / (dataset.name + "_card.json"), std::ios::binary) << card;
}

}  // namespace ttc::testing
