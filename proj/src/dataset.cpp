#include "entailrl/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "entailrl/text.hpp"

namespace entailrl {

using nlohmann::json;

TaskSetting parse_setting(const std::string& name) {
  if (name == "task1") return TaskSetting::Task1;
  if (name == "task2") return TaskSetting::Task2;
  if (name == "task3") return TaskSetting::Task3;
  throw Error(ErrorCode::MalformedRecord, "unknown setting: " + name);
}

const char* setting_name(TaskSetting setting) {
  switch (setting) {
    case TaskSetting::Task1: return "task1";
    case TaskSetting::Task2: return "task2";
    case TaskSetting::Task3: return "task3";
  }
  return "task1";
}

namespace {

const json* find_field(const json& record, std::initializer_list<const char*> names) {
  for (const char* name : names) {
    auto it = record.find(name);
    if (it != record.end() && !it->is_null()) return &*it;
  }
  return nullptr;
}

std::string require_string(const json& record, std::initializer_list<const char*> names,
                           int line) {
  const json* field = find_field(record, names);
  if (field == nullptr || !field->is_string())
    throw Error(ErrorCode::MalformedRecord,
                "line " + std::to_string(line) + ": missing field '" +
                    std::string(*names.begin()) + "'");
  return field->get<std::string>();
}

std::map<std::string, std::string> sentence_map(const json& record, int line) {
  const json* field = find_field(record, {"sentences", "triples"});
  if (field == nullptr) {
    auto meta = record.find("meta");
    if (meta != record.end() && meta->is_object()) {
      auto triples = meta->find("triples");
      if (triples != meta->end()) field = &*triples;
    }
  }
  if (field == nullptr || !field->is_object())
    throw Error(ErrorCode::MalformedRecord,
                "line " + std::to_string(line) + ": missing sentence map");
  std::map<std::string, std::string> facts;
  for (const auto& [id, text] : field->items()) {
    if (!text.is_string())
      throw Error(ErrorCode::MalformedRecord,
                  "line " + std::to_string(line) + ": sentence " + id +
                      " is not a string");
    std::string normalized = normalize_whitespace(text.get<std::string>());
    if (normalized.empty())
      throw Error(ErrorCode::MalformedRecord,
                  "line " + std::to_string(line) + ": sentence " + id + " is empty");
    facts[id] = normalized;
  }
  return facts;
}

}  // namespace

std::vector<Instance> load_jsonl(const std::string& path,
                                 std::optional<TaskSetting> forced_setting) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);

  std::vector<Instance> instances;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (normalize_whitespace(line).empty()) continue;
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object())
      throw Error(ErrorCode::MalformedRecord,
                  "line " + std::to_string(line_no) + ": not a JSON object");

    Instance inst;
    inst.id = require_string(record, {"id"}, line_no);
    inst.question = require_string(record, {"question", "question_text"}, line_no);
    inst.answer = require_string(record, {"answer", "answer_text"}, line_no);
    inst.hypothesis = normalize_whitespace(
        require_string(record, {"hypothesis"}, line_no));
    inst.facts = sentence_map(record, line_no);

    if (forced_setting) {
      inst.setting = *forced_setting;
    } else if (const json* field = find_field(record, {"setting", "task"})) {
      inst.setting = parse_setting(field->get<std::string>());
    }

    std::string proof = require_string(record, {"proof", "proofs"}, line_no);
    std::map<std::string, std::string> bank = inst.facts;
    bank[kHypothesisId] = inst.hypothesis;
    try {
      inst.gold_tree = parse_proof(proof, bank);
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + " (" + inst.id +
                                "): " + e.what());
    }

    if (inst.setting == TaskSetting::Task1) {
      auto leaves = inst.gold_tree.leaf_ids();
      std::set<std::string> pool;
      for (const auto& [id, text] : inst.facts) pool.insert(id);
      if (leaves != pool)
        throw Error(ErrorCode::MalformedRecord,
                    "line " + std::to_string(line_no) + " (" + inst.id +
                        "): task1 instance has unused facts");
    }
    instances.push_back(std::move(inst));
  }
  return instances;
}

std::string instance_to_json_line(const Instance& instance) {
  json record;
  record["id"] = instance.id;
  record["question"] = instance.question;
  record["answer"] = instance.answer;
  record["hypothesis"] = instance.hypothesis;
  record["proof"] = serialize_proof(instance.gold_tree);
  record["sentences"] = json::object();
  for (const auto& [id, text] : instance.facts) record["sentences"][id] = text;
  record["setting"] = setting_name(instance.setting);
  return record.dump();
}

void write_jsonl(const std::vector<Instance>& instances, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  for (const auto& inst : instances) out << instance_to_json_line(inst) << "\n";
}

std::vector<GoldStepExample> extract_gold_steps(const Instance& instance) {
  EntailmentTree gold = binarize(instance.gold_tree);

  std::set<std::string> state;
  std::map<std::string, std::string> texts;
  std::vector<std::string> pool;
  for (const auto& [id, text] : instance.facts) {
    state.insert(id);
    texts[id] = text;
    pool.push_back(text);
  }

  std::vector<GoldStepExample> examples;
  for (const auto& step : gold.steps) {
    const std::string& a = step.premises[0];
    const std::string& b = step.premises[1];
    // a filtered fact pool can strand a gold step; skip the example but keep
    // replaying so later steps still see their teacher-forced states
    if (state.count(a) && state.count(b)) {
      GoldStepExample ex;
      ex.state_node_ids = state;
      ex.positive_action = node_id_less(a, b) ? std::make_pair(a, b)
                                              : std::make_pair(b, a);
      ex.hypothesis_text = instance.hypothesis;
      for (const auto& id : state) ex.node_texts[id] = texts.at(id);
      ex.fact_pool_texts = pool;
      examples.push_back(std::move(ex));
    }

    state.erase(a);
    state.erase(b);
    state.insert(step.conclusion_id);
    texts[step.conclusion_id] = step.conclusion_text;
  }
  return examples;
}

double lexical_relevance(const std::string& fact_text, const Instance& instance) {
  return lexical_similarity(fact_text, instance.hypothesis);
}

Instance filter_facts(const Instance& instance, const RelevanceScorer& scorer,
                      std::size_t top_k, double threshold) {
  std::vector<std::pair<double, std::string>> scored;
  for (const auto& [id, text] : instance.facts)
    scored.emplace_back(scorer(text, instance), id);
  // descending score, id tiebreak for determinism
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return node_id_less(a.second, b.second);
  });

  std::set<std::string> kept;
  if (instance.setting == TaskSetting::Task3) {
    for (const auto& [score, id] : scored)
      if (score >= threshold) kept.insert(id);
  } else {
    for (std::size_t i = 0; i < scored.size() && i < top_k; ++i)
      kept.insert(scored[i].second);
  }
  if (kept.empty())
    throw Error(ErrorCode::EmptyAfterFilter, instance.id);

  Instance out = instance;
  out.facts.clear();
  for (const auto& [id, text] : instance.facts)
    if (kept.count(id)) out.facts[id] = text;
  out.dropped_gold_leaves.clear();
  for (const auto& leaf : instance.gold_tree.leaf_ids())
    if (!kept.count(leaf)) out.dropped_gold_leaves.push_back(leaf);
  return out;
}

std::vector<Instance> efficiency_split(const std::vector<Instance>& dataset,
                                       std::size_t max_facts) {
  std::vector<Instance> kept;
  for (const auto& inst : dataset)
    if (inst.gold_tree.leaf_ids().size() <= max_facts) kept.push_back(inst);
  return kept;
}

std::size_t total_gold_steps(const std::vector<Instance>& dataset) {
  std::size_t total = 0;
  for (const auto& inst : dataset) total += inst.gold_tree.steps.size();
  return total;
}

}  // namespace entailrl
