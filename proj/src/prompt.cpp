#include "ttc/prompt.hpp"

#include <algorithm>
#include <map>

#include "ttc/error.hpp"
#include "ttc/util.hpp"

namespace ttc {
namespace {

const std::string kExampleDash = " — label: ";

std::string find_description(const std::vector<std::pair<std::string, std::string>>& entries,
                             const std::string& key, const char* what) {
  for (const auto& [name, text] : entries) {
    if (name == key) return text;
  }
  throw Error(std::string("card has no ") + what + " entry for '" + key + "'");
}

}  // namespace

std::string ContextBlock::rendered() const {
  return "## Task Definition\n" + task_definition +
         "\n\n## Dataset Description\n" + dataset_description +
         "\n\n## Class Definitions\n" + class_definitions +
         "\n\n## Channel Information\n" + channel_descriptions;
}

ContextBlock build_context(const DatasetCard& card, const Dataset& dataset) {
  ContextBlock block;
  block.task_definition = card.task_definition;
  block.dataset_description = card.dataset_description;

  // Lists follow dataset order, not card order.
  std::string classes;
  for (const auto& cls : dataset.classes) {
    classes += "- " + cls + ": " +
               find_description(card.class_definitions, cls, "class definition") + "\n";
  }
  if (!classes.empty()) classes.pop_back();
  block.class_definitions = classes;

  std::string channels;
  for (const auto& channel : dataset.channel_names) {
    channels += "- " + channel + ": " +
                find_description(card.channel_descriptions, channel, "channel description") +
                "\n";
  }
  if (!channels.empty()) channels.pop_back();
  block.channel_descriptions = channels;
  return block;
}

std::string build_instruction(const std::vector<std::string>& classes) {
  if (classes.empty()) throw Error("build_instruction: empty class set");

  std::string list;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (i > 0) list += ", ";
    list += classes[i];
  }
  return "Classify the query series into exactly one of the following classes: " + list +
         ".\n"
         "1. Study the channel information to understand what each channel measures.\n"
         "2. Compare the query table against each labeled example, channel by channel and "
         "across time steps.\n"
         "3. Weigh agreement with the labeled examples against disagreement with the "
         "contrastive examples.\n"
         "4. Choose exactly one class from the list above.\n"
         "5. Explain your reasoning, then finish with one final line of the exact form "
         "Label: <class>";
}

ExampleBlock make_example_block(const NeighborHit& hit, ExampleRole role, int rank,
                                std::string serialized_table) {
  ExampleBlock block;
  block.role = role;
  block.serialized_table = std::move(serialized_table);
  block.label = hit.label;
  block.rank = rank;
  block.train_index = hit.train_index;
  block.distance = hit.distance;
  return block;
}

PromptBundle assemble_prompt(ContextBlock context, std::vector<ExampleBlock> examples,
                             std::string query_table, std::string instruction, bool magic) {
  const bool ordered = std::is_sorted(
      examples.begin(), examples.end(), [](const ExampleBlock& a, const ExampleBlock& b) {
        return static_cast<int>(a.role) < static_cast<int>(b.role);
      });
  if (!ordered) throw Error("assemble_prompt: negatives must follow all positives");

  PromptBundle bundle;
  bundle.context = std::move(context);
  bundle.examples = std::move(examples);
  bundle.query_table = std::move(query_table);
  bundle.instruction = std::move(instruction);
  if (magic) bundle.magic_suffix = kMagicSuffix;

  bundle.system_text = bundle.context.rendered();

  std::vector<std::string> sections;
  int number = 0;
  bool negatives_started = false;
  for (const auto& block : bundle.examples) {
    ++number;
    if (block.role == ExampleRole::Positive) {
      if (number == 1) sections.emplace_back("## Labeled Examples");
      bundle.provenance.positives.push_back({block.train_index, block.distance, block.label});
    } else {
      if (!negatives_started) {
        sections.emplace_back("## Contrastive Examples (dissimilar to the query)");
        negatives_started = true;
      }
      bundle.provenance.negatives.push_back({block.train_index, block.distance, block.label});
    }
    sections.push_back("### Example " + std::to_string(number) + kExampleDash + block.label +
                       "\n" + block.serialized_table);
  }
  sections.push_back("## Query\n" + bundle.query_table);
  sections.push_back("## Instructions\n" + bundle.instruction);
  if (bundle.magic_suffix) sections.push_back(*bundle.magic_suffix);

  std::string body;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    if (i > 0) body += "\n\n";
    body += sections[i];
  }
  bundle.user_text = std::move(body);
  bundle.rendered = bundle.system_text + "\n\n" + bundle.user_text;
  return bundle;
}

std::string PromptBundle::prompt_hash() const { return to_hex(fnv1a64(rendered)); }

}  // namespace ttc
