#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "entailrl/tree.hpp"

namespace entailrl {

enum class TaskSetting { Task1, Task2, Task3 };

TaskSetting parse_setting(const std::string& name);  // "task1" | "task2" | "task3"
const char* setting_name(TaskSetting setting);

struct Instance {
  std::string id;
  std::string question;
  std::string answer;
  std::string hypothesis;
  std::map<std::string, std::string> facts;  // gold + distractors per setting
  EntailmentTree gold_tree;
  TaskSetting setting = TaskSetting::Task1;
  // Diagnostics: gold leaves removed by filter_facts (empty before filtering).
  std::vector<std::string> dropped_gold_leaves;
};

// One teacher-forced sentence-selection example. node_texts/fact_pool_texts
// make the example self-contained for featurization.
struct GoldStepExample {
  std::set<std::string> state_node_ids;
  std::pair<std::string, std::string> positive_action;  // canonical node order
  std::string hypothesis_text;
  std::map<std::string, std::string> node_texts;
  std::vector<std::string> fact_pool_texts;
};

// JSONL schema:
//   {"id", "question", "answer", "hypothesis", "proof", "sentences": {id: text},
//    "setting" (optional)}
// Field aliases accepted: question_text, answer_text, proofs, triples
// (and meta.triples) for sentences.
std::vector<Instance> load_jsonl(const std::string& path,
                                 std::optional<TaskSetting> forced_setting = {});

// Canonical re-emission of the schema above (sorted keys, canonical proofs).
void write_jsonl(const std::vector<Instance>& instances, const std::string& path);
std::string instance_to_json_line(const Instance& instance);

// One example per binarized gold step, states replayed with teacher forcing.
std::vector<GoldStepExample> extract_gold_steps(const Instance& instance);

using RelevanceScorer =
    std::function<double(const std::string& fact_text, const Instance& instance)>;

// Default scorer: unigram-overlap F1 between the fact and the hypothesis.
double lexical_relevance(const std::string& fact_text, const Instance& instance);

// Task 2 keeps the top_k highest scorers; Task 3 keeps facts scoring at least
// `threshold`. Never touches texts or the gold tree; dropped gold leaves are
// recorded in the returned instance's diagnostics field.
Instance filter_facts(const Instance& instance, const RelevanceScorer& scorer,
                      std::size_t top_k, double threshold);

// Keeps instances whose gold tree has at most max_facts leaves.
std::vector<Instance> efficiency_split(const std::vector<Instance>& dataset,
                                       std::size_t max_facts);

std::size_t total_gold_steps(const std::vector<Instance>& dataset);

}  // namespace entailrl
