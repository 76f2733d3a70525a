#include "entailrl/synthetic.hpp"

#include <algorithm>
#include <random>

#include "entailrl/deduction.hpp"

namespace entailrl::synthetic {

namespace {

const char* kSyllables[] = {"ba", "ce", "di", "fo", "gu", "ha", "ke", "li",
                            "mo", "nu", "pa", "re", "si", "to", "vu", "wa",
                            "ze", "lo", "mi", "ru"};
constexpr std::size_t kSyllableCount = sizeof(kSyllables) / sizeof(kSyllables[0]);

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

// Chain gold proof over facts sent1..sentN with rule-based intermediates.
void attach_chain_proof(Instance& inst, int n_facts) {
  std::vector<ProofStep> steps;
  std::string left_id = "sent1";
  std::string left_text = inst.facts.at("sent1");
  for (int k = 2; k <= n_facts; ++k) {
    std::string right_id = "sent" + std::to_string(k);
    std::string text = rule_based_deduce(left_text, inst.facts.at(right_id));
    if (k == n_facts) {
      steps.push_back(ProofStep{{left_id, right_id}, kHypothesisId, ""});
    } else {
      std::string cid = "int" + std::to_string(k - 1);
      steps.push_back(ProofStep{{left_id, right_id}, cid, text});
      left_id = cid;
    }
    left_text = text;
  }
  inst.gold_tree = make_tree(steps, inst.facts, inst.hypothesis);
}

struct TokenCounter {
  std::size_t next = 0;
  std::string take() { return word(next++); }
};

Instance make_separable_instance(int index, int n_facts, TokenCounter& counter) {
  Instance inst;
  inst.id = "syn-" + std::to_string(index);

  std::vector<std::string> hypothesis_tokens;
  auto add_fact = [&](int fact_no, int hyp_tokens, int filler_tokens) {
    std::vector<std::string> tokens;
    for (int t = 0; t < hyp_tokens; ++t) {
      tokens.push_back(counter.take());
      hypothesis_tokens.push_back(tokens.back());
    }
    for (int t = 0; t < filler_tokens; ++t) tokens.push_back(counter.take());
    inst.facts["sent" + std::to_string(fact_no)] = join(tokens);
  };

  add_fact(1, 4, 0);
  add_fact(2, 4, 0);
  for (int k = 3; k <= n_facts; ++k) add_fact(k, 1, k - 3);

  inst.hypothesis = join(hypothesis_tokens);
  inst.question = "why does " + hypothesis_tokens.front() + " lead to " +
                  hypothesis_tokens.back();
  inst.answer = hypothesis_tokens.back();
  attach_chain_proof(inst, n_facts);
  return inst;
}

}  // namespace

std::string word(std::size_t index) {
  std::string out;
  std::size_t v = index;
  for (int i = 0; i < 4; ++i) {
    out += kSyllables[v % kSyllableCount];
    v /= kSyllableCount;
  }
  if (v > 0) out += std::to_string(v);
  return out;
}

std::vector<Instance> separable_corpus(int count, std::uint64_t seed,
                                       int distractors) {
  TokenCounter counter;
  counter.next = static_cast<std::size_t>(seed % 89) * 9013;

  std::vector<Instance> instances;
  instances.reserve(count);
  for (int i = 0; i < count; ++i) {
    int n_facts = 3 + (i % 4);
    instances.push_back(make_separable_instance(i, n_facts, counter));
  }

  if (distractors > 0) {
    // borrow facts from the next instance; tokens are globally unique so
    // they share nothing with this instance's hypothesis
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const Instance& donor = instances[(i + 1) % instances.size()];
      Instance& inst = instances[i];
      int next_id = static_cast<int>(inst.facts.size()) + 1;
      auto it = donor.facts.begin();
      for (int d = 0; d < distractors && it != donor.facts.end(); ++d, ++it)
        inst.facts["sent" + std::to_string(next_id++)] = it->second;
      inst.setting = TaskSetting::Task2;
    }
  }
  return instances;
}

PolicyParams oracle_params() {
  PolicyParams params;
  params.weights[0] = 40.0;  // guidance_f1 separates gold pairs by design
  return params;
}

namespace {

struct ShapeRow {
  int count;
  int leaves;
  int steps;  // < leaves-1 means multi-premise steps are used
};

Instance make_shaped_instance(const std::string& split, int index,
                              const ShapeRow& row, TokenCounter& counter) {
  Instance inst;
  inst.id = split + "-" + std::to_string(index);

  std::vector<std::string> hypothesis_tokens;
  for (int k = 1; k <= row.leaves; ++k) {
    std::vector<std::string> tokens;
    for (int t = 0; t < 2; ++t) tokens.push_back(counter.take());
    hypothesis_tokens.push_back(tokens.front());
    inst.facts["sent" + std::to_string(k)] = join(tokens);
  }
  inst.hypothesis = join(hypothesis_tokens);
  inst.question = "what follows from " + hypothesis_tokens.front();
  inst.answer = hypothesis_tokens.back();

  // Build `steps` proof steps over `leaves` facts: the first step absorbs
  // enough premises to leave one two-premise step per remaining fact.
  int first_arity = row.leaves - row.steps + 1;
  std::vector<ProofStep> steps;
  std::vector<std::string> first;
  int fact_no = 1;
  for (int i = 0; i < first_arity; ++i)
    first.push_back("sent" + std::to_string(fact_no++));
  std::string left_text = inst.facts.at(first.front());
  for (std::size_t i = 1; i < first.size(); ++i)
    left_text = rule_based_deduce(left_text, inst.facts.at(first[i]));

  std::string left_id;
  if (row.steps == 1) {
    steps.push_back(ProofStep{first, kHypothesisId, ""});
  } else {
    left_id = "int1";
    steps.push_back(ProofStep{first, left_id, left_text});
    for (int s = 2; s <= row.steps; ++s) {
      std::string right_id = "sent" + std::to_string(fact_no++);
      left_text = rule_based_deduce(left_text, inst.facts.at(right_id));
      if (s == row.steps) {
        steps.push_back(ProofStep{{left_id, right_id}, kHypothesisId, ""});
      } else {
        std::string cid = "int" + std::to_string(s);
        steps.push_back(ProofStep{{left_id, right_id}, cid, left_text});
        left_id = cid;
      }
    }
  }
  inst.gold_tree = make_tree(steps, inst.facts, inst.hypothesis);
  return inst;
}

}  // namespace

std::vector<Instance> official_shape_split(const std::string& which) {
  std::vector<ShapeRow> rows;
  if (which == "train") {
    rows = {{270, 2, 1}, {47, 3, 1}, {259, 3, 2}, {75, 4, 2},
            {167, 4, 3}, {281, 6, 5}, {214, 7, 6}};
  } else if (which == "dev") {
    rows = {{14, 3, 2}, {123, 4, 3}, {50, 5, 4}};
  } else if (which == "test") {
    rows = {{11, 3, 2}, {229, 4, 3}, {100, 5, 4}};
  } else {
    throw Error(ErrorCode::IoError, "unknown split: " + which);
  }

  std::vector<ShapeRow> shapes;
  for (const auto& row : rows)
    for (int i = 0; i < row.count; ++i) shapes.push_back({1, row.leaves, row.steps});

  // deterministic Fisher-Yates so the shapes interleave across the split
  std::mt19937_64 rng(0x5eed0 + shapes.size());
  for (std::size_t i = shapes.size(); i > 1; --i) {
    std::size_t j = rng() % i;
    std::swap(shapes[i - 1], shapes[j]);
  }

  TokenCounter counter;
  counter.next = which == "train" ? 0 : (which == "dev" ? 40'000 : 60'000);
  std::vector<Instance> instances;
  instances.reserve(shapes.size());
  for (std::size_t i = 0; i < shapes.size(); ++i)
    instances.push_back(
        make_shaped_instance(which, static_cast<int>(i), shapes[i], counter));
  return instances;
}

Instance misordered_instance() {
  Instance inst;
  inst.id = "misordered";
  inst.facts = {{"sent1", "ice is frozen water"},
                {"sent2", "frozen things are cold"},
                {"sent3", "ice floats on water"},
                {"sent4", "cold things melt slowly"}};
  inst.question = "what is true of ice";
  inst.answer = "it is cold, floats, and melts slowly";
  inst.hypothesis = "ice is cold and floats and melts slowly";

  std::string int1 = rule_based_deduce(inst.facts["sent1"], inst.facts["sent2"]);
  std::string int2 = rule_based_deduce(int1, inst.facts["sent3"]);
  std::vector<ProofStep> steps = {
      ProofStep{{"sent1", "sent2"}, "int1", int1},
      ProofStep{{"int1", "sent3"}, "int2", int2},
      ProofStep{{"int2", "sent4"}, kHypothesisId, ""},
  };
  inst.gold_tree = make_tree(steps, inst.facts, inst.hypothesis);
  return inst;
}

std::vector<std::pair<std::string, std::string>> misordered_actions() {
  return {{"sent1", "sent3"}, {"p1", "sent2"}, {"p2", "sent4"}};
}

Trajectory scripted_trajectory(const Instance& instance,
                               const std::vector<std::pair<std::string, std::string>>& pairs,
                               const RolloutConfig& cfg) {
  Trajectory traj;
  traj.instance_id = instance.id;
  State state = init_state(instance, cfg);
  for (const auto& [a, b] : pairs) {
    TrajectoryRecord rec;
    rec.available_ids.assign(state.available.begin(), state.available.end());
    std::sort(rec.available_ids.begin(), rec.available_ids.end(), node_id_less);
    rec.action = Action::pair(a, b);
    rec.executed_action = rec.action;
    state = step(state, rec.action, cfg.deduce, cfg.allow_reuse);
    rec.conclusion_id = "p" + std::to_string(state.step_index);
    rec.conclusion_text = state.texts.at(rec.conclusion_id);
    traj.records.push_back(std::move(rec));
  }
  if (!cfg.in_hoc && !traj.records.empty())
    traj.records.back().conclusion_text = instance.hypothesis;
  traj.terminal_reason = state.available.size() <= 1
                             ? TerminalReason::SingleNodeLeft
                             : TerminalReason::EndToken;
  return traj;
}

}  // namespace entailrl::synthetic
