#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ttc/dataset.hpp"
#include "ttc/distance.hpp"

namespace ttc {

// The incentive sentence appended when the magic-words flag is on.
inline constexpr const char* kMagicSuffix =
    "If you do your best to provide me with the correct answer, I will pay you 10 "
    "billion dollars.";

// The four context sections, rendered with fixed headings in fixed order.
struct ContextBlock {
  std::string task_definition;
  std::string dataset_description;
  std::string class_definitions;
  std::string channel_descriptions;

  std::string rendered() const;
};

enum class ExampleRole { Positive, Negative };

struct ExampleBlock {
  ExampleRole role = ExampleRole::Positive;
  std::string serialized_table;
  std::string label;
  int rank = 1;  // 1-based, ascending distance within the role
  // Provenance of the training sample this block was built from.
  int train_index = -1;
  double distance = 0.0;
};

struct PromptProvenance {
  std::vector<NeighborHit> positives;
  std::vector<NeighborHit> negatives;
};

struct PromptBundle {
  ContextBlock context;
  std::vector<ExampleBlock> examples;  // positives first, then negatives
  std::string query_table;
  std::string instruction;
  std::optional<std::string> magic_suffix;
  PromptProvenance provenance;

  // system_text is the context block; user_text is everything else.
  // rendered = system_text + "\n\n" + user_text.
  std::string system_text;
  std::string user_text;
  std::string rendered;

  std::string prompt_hash() const;
};

ContextBlock build_context(const DatasetCard& card, const Dataset& dataset);

// Fixed five-step template enumerating the classes in dataset order; always
// ends with the output contract line requiring "Label: <class>".
std::string build_instruction(const std::vector<std::string>& classes);

ExampleBlock make_example_block(const NeighborHit& hit, ExampleRole role, int rank,
                                std::string serialized_table);

PromptBundle assemble_prompt(ContextBlock context, std::vector<ExampleBlock> examples,
                             std::string query_table, std::string instruction, bool magic);

}  // namespace ttc
