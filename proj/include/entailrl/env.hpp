#pragma once

#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "entailrl/common.hpp"
#include "entailrl/dataset.hpp"
#include "entailrl/deduction.hpp"

namespace entailrl {

struct PolicyParams;  // policy.hpp

struct State {
  std::set<std::string> available;  // unused nodes: facts plus live intermediates
  int step_index = 0;
  std::string guidance_text;  // hypothesis, or question in in-hoc mode
  bool terminal = false;
  // Texts for every node defined so far (consumed nodes included).
  std::map<std::string, std::string> texts;
  // IDF document pool: the instance's fact sentences.
  std::vector<std::string> fact_pool_texts;
};

enum class ActionKind { Pair, End };

struct Action {
  ActionKind kind = ActionKind::Pair;
  std::string first, second;  // canonical node order; empty for End

  static Action pair(std::string a, std::string b);
  static Action end() { return Action{ActionKind::End, "", ""}; }
  bool operator==(const Action&) const = default;
};

enum class TerminalReason { SingleNodeLeft, EndToken, MaxSteps };

struct TrajectoryRecord {
  std::vector<std::string> available_ids;  // state snapshot, canonical order
  Action action;           // the sampled action; log_prob/features refer to it
  Action executed_action;  // what drove the transition (gold under teacher forcing)
  std::string conclusion_id;
  std::string conclusion_text;
  double log_prob = 0.0;
  // Full action space at this state, needed to recompute gradients.
  std::vector<Action> actions;
  std::vector<FeatureVector> action_features;
  int chosen_index = -1;
};

struct Trajectory {
  std::string instance_id;
  std::vector<TrajectoryRecord> records;
  TerminalReason terminal_reason = TerminalReason::SingleNodeLeft;

  nlohmann::json to_json() const;
};

struct RolloutConfig {
  TaskSetting setting = TaskSetting::Task1;
  bool in_hoc = false;
  bool greedy = false;
  bool allow_reuse = false;
  int max_steps = 100;
  DeduceFn deduce;  // defaults to rule_based_deduce when empty
};

struct StepReward {
  double immediate = 0.0;   // +1 or -1
  double cumulative = 0.0;  // discounted sum of subsequent immediates
};

State init_state(const Instance& instance, const RolloutConfig& cfg);

// All C(n,2) unordered pairs in canonical node order, plus END when the task
// setting allows it and at least one step has been taken.
std::vector<Action> action_space(const State& state, const RolloutConfig& cfg);

// Pair: consumes both premises and adds intermediate p{K}. End: marks the
// state terminal. Pure given a deterministic deduce function.
State step(const State& state, const Action& action, const DeduceFn& deduce,
           bool allow_reuse = false);

Trajectory rollout(const PolicyParams& params, const Instance& instance,
                   const RolloutConfig& cfg, std::mt19937_64& rng);

// Realized tree of the executed steps. The final conclusion becomes the root
// labelled with the instance hypothesis (default) or the generated text
// (in-hoc). Connectivity is not enforced: an early END may strand nodes.
EntailmentTree trajectory_to_tree(const Trajectory& traj, const Instance& instance,
                                  bool in_hoc);

// Per-step ±1 rewards against the binarized gold tree, accumulated with
// discount gamma. aligned=true scores each selection under the alignment
// substitution rule; aligned=false demands an exact chronological replay of
// gold (an intermediate premise only equals its gold counterpart when the
// step that produced it matched). END earns +1 iff every gold leaf was
// consumed beforehand.
std::vector<StepReward> assign_rewards(const Trajectory& traj,
                                       const EntailmentTree& gold, double gamma,
                                       bool aligned = true);

std::vector<double> discounted_cumulative(const std::vector<double>& immediate,
                                          double gamma);

double trajectory_total(const std::vector<StepReward>& rewards);

}  // namespace entailrl
