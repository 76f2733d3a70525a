#include "entailrl/env.hpp"

#include <algorithm>

#include "entailrl/alignment.hpp"
#include "entailrl/policy.hpp"

namespace entailrl {

Action Action::pair(std::string a, std::string b) {
  if (!node_id_less(a, b)) std::swap(a, b);
  return Action{ActionKind::Pair, std::move(a), std::move(b)};
}

nlohmann::json Trajectory::to_json() const {
  nlohmann::json records_json = nlohmann::json::array();
  for (const auto& rec : records) {
    nlohmann::json r;
    r["state"] = rec.available_ids;
    if (rec.action.kind == ActionKind::End) {
      r["action"] = "END";
    } else {
      r["action"] = {rec.action.first, rec.action.second};
    }
    if (rec.executed_action != rec.action) {
      r["executed_action"] = {rec.executed_action.first, rec.executed_action.second};
    }
    r["conclusion"] = rec.conclusion_text;
    r["log_prob"] = rec.log_prob;
    records_json.push_back(std::move(r));
  }
  const char* reason = terminal_reason == TerminalReason::SingleNodeLeft
                           ? "single_node_left"
                           : terminal_reason == TerminalReason::EndToken
                                 ? "end_token"
                                 : "max_steps";
  return nlohmann::json{{"instance_id", instance_id},
                        {"records", std::move(records_json)},
                        {"terminal_reason", reason}};
}

State init_state(const Instance& instance, const RolloutConfig& cfg) {
  if (instance.facts.empty())
    throw Error(ErrorCode::EmptyInstance, instance.id);
  State state;
  for (const auto& [id, text] : instance.facts) {
    state.available.insert(id);
    state.texts[id] = text;
    state.fact_pool_texts.push_back(text);
  }
  state.guidance_text = cfg.in_hoc ? instance.question : instance.hypothesis;
  return state;
}

std::vector<Action> action_space(const State& state, const RolloutConfig& cfg) {
  std::vector<std::string> ids(state.available.begin(), state.available.end());
  std::sort(ids.begin(), ids.end(), node_id_less);

  std::vector<Action> actions;
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j)
      actions.push_back(Action{ActionKind::Pair, ids[i], ids[j]});

  bool end_allowed = cfg.setting != TaskSetting::Task1 && state.step_index >= 1;
  if (end_allowed) actions.push_back(Action::end());
  return actions;
}

State step(const State& state, const Action& action, const DeduceFn& deduce,
           bool allow_reuse) {
  if (state.terminal) throw Error(ErrorCode::InvalidAction, "state is terminal");
  State next = state;
  if (action.kind == ActionKind::End) {
    next.terminal = true;
    next.step_index = state.step_index + 1;
    return next;
  }
  if (action.first == action.second || !state.available.count(action.first) ||
      !state.available.count(action.second))
    throw Error(ErrorCode::InvalidAction,
                action.first + " & " + action.second);

  if (!allow_reuse) {
    next.available.erase(action.first);
    next.available.erase(action.second);
  }
  std::string new_id = "p" + std::to_string(state.step_index + 1);
  const std::string& a_text = state.texts.at(action.first);
  const std::string& b_text = state.texts.at(action.second);
  std::string text = deduce ? deduce(a_text, b_text) : rule_based_deduce(a_text, b_text);
  next.available.insert(new_id);
  next.texts[new_id] = text;
  next.step_index = state.step_index + 1;
  return next;
}

Trajectory rollout(const PolicyParams& params, const Instance& instance,
                   const RolloutConfig& cfg, std::mt19937_64& rng) {
  Trajectory traj;
  traj.instance_id = instance.id;
  State state = init_state(instance, cfg);

  while (true) {
    if (state.available.size() <= 1) {
      traj.terminal_reason = TerminalReason::SingleNodeLeft;
      break;
    }
    if (state.step_index >= cfg.max_steps) {
      traj.terminal_reason = TerminalReason::MaxSteps;
      break;
    }
    std::vector<Action> actions = action_space(state, cfg);
    std::vector<FeatureVector> features =
        featurize_actions(state.guidance_text, actions, state);
    std::vector<double> probs = score_actions(params, features);
    int chosen = cfg.greedy ? argmax_action(probs) : sample_action(probs, rng);

    TrajectoryRecord rec;
    rec.available_ids.assign(state.available.begin(), state.available.end());
    std::sort(rec.available_ids.begin(), rec.available_ids.end(), node_id_less);
    rec.action = actions[chosen];
    rec.executed_action = actions[chosen];
    rec.log_prob = std::log(probs[chosen]);
    rec.actions = std::move(actions);
    rec.action_features = std::move(features);
    rec.chosen_index = chosen;

    if (rec.action.kind == ActionKind::End) {
      traj.records.push_back(std::move(rec));
      traj.terminal_reason = TerminalReason::EndToken;
      break;
    }
    state = step(state, rec.action, cfg.deduce, cfg.allow_reuse);
    rec.conclusion_id = "p" + std::to_string(state.step_index);
    rec.conclusion_text = state.texts.at(rec.conclusion_id);
    traj.records.push_back(std::move(rec));
  }

  // The last pair conclusion is the root; in default mode it carries the
  // hypothesis label rather than the generated text.
  if (!cfg.in_hoc) {
    for (auto it = traj.records.rbegin(); it != traj.records.rend(); ++it) {
      if (it->action.kind == ActionKind::Pair) {
        it->conclusion_text = instance.hypothesis;
        break;
      }
    }
  }
  return traj;
}

EntailmentTree trajectory_to_tree(const Trajectory& traj, const Instance& instance,
                                  bool in_hoc) {
  std::vector<ProofStep> steps;
  for (const auto& rec : traj.records) {
    if (rec.executed_action.kind != ActionKind::Pair) continue;
    steps.push_back(ProofStep{{rec.executed_action.first, rec.executed_action.second},
                              rec.conclusion_id, rec.conclusion_text});
  }
  if (!steps.empty()) {
    ProofStep& last = steps.back();
    last.conclusion_id = kHypothesisId;
    last.conclusion_text = in_hoc ? last.conclusion_text : instance.hypothesis;
  }
  return make_tree(steps, instance.facts,
                   in_hoc ? (steps.empty() ? "" : steps.back().conclusion_text)
                          : instance.hypothesis,
                   /*require_connected=*/false);
}

std::vector<double> discounted_cumulative(const std::vector<double>& immediate,
                                          double gamma) {
  std::vector<double> cumulative(immediate.size(), 0.0);
  double running = 0.0;
  for (std::size_t i = immediate.size(); i-- > 0;) {
    running = immediate[i] + gamma * running;
    cumulative[i] = running;
  }
  return cumulative;
}

double trajectory_total(const std::vector<StepReward>& rewards) {
  double total = 0.0;
  for (const auto& r : rewards) total += r.cumulative;
  return total;
}

namespace {

// Leaf sets for every node id realized along the executed trajectory.
std::map<std::string, std::set<std::string>> realized_leaf_sets(
    const Trajectory& traj) {
  std::map<std::string, std::set<std::string>> leaves;
  for (const auto& rec : traj.records) {
    for (const auto& id : rec.available_ids) {
      if (classify_id(id) == NodeKind::Fact) leaves[id] = {id};
    }
    if (rec.executed_action.kind != ActionKind::Pair) continue;
    std::set<std::string> merged;
    for (const auto& premise :
         {rec.executed_action.first, rec.executed_action.second}) {
      auto it = leaves.find(premise);
      if (it == leaves.end()) {
        if (classify_id(premise) == NodeKind::Fact) {
          merged.insert(premise);
          continue;
        }
        leaves[premise] = {};
        it = leaves.find(premise);
      }
      merged.insert(it->second.begin(), it->second.end());
    }
    leaves[rec.conclusion_id] = std::move(merged);
  }
  return leaves;
}

}  // namespace

std::vector<StepReward> assign_rewards(const Trajectory& traj,
                                       const EntailmentTree& gold, double gamma,
                                       bool aligned) {
  EntailmentTree gold_bin = binarize(gold);
  std::set<std::string> gold_leaves = gold.leaf_ids();

  // gold internal candidates (non-root), in step order, with leaf sets
  std::vector<std::pair<std::string, std::set<std::string>>> candidates;
  std::map<std::string, const ProofStep*> gold_by_conclusion;
  for (const auto& step : gold_bin.steps) {
    gold_by_conclusion[step.conclusion_id] = &step;
    if (step.conclusion_id != gold_bin.root_id)
      candidates.emplace_back(step.conclusion_id,
                              leaf_descendants(gold_bin, step.conclusion_id));
  }
  auto argmax_gold = [&](const std::set<std::string>& leaves)
      -> std::optional<std::string> {
    double best = 0.0;
    std::optional<std::string> target;
    for (const auto& [gid, gleaves] : candidates) {
      double sim = jaccard(leaves, gleaves);
      if (sim > best) {
        best = sim;
        target = gid;
      }
    }
    return target;
  };

  std::map<std::string, std::set<std::string>> leaves = realized_leaf_sets(traj);

  // index of the last pair record: its conclusion plays the root
  std::ptrdiff_t last_pair = -1;
  for (std::size_t k = 0; k < traj.records.size(); ++k)
    if (traj.records[k].action.kind == ActionKind::Pair)
      last_pair = static_cast<std::ptrdiff_t>(k);

  // aligned substitution for realized intermediates
  std::map<std::string, std::optional<std::string>> realized_alignment;
  for (const auto& [id, ls] : leaves) {
    if (classify_id(id) == NodeKind::Fact) continue;
    realized_alignment[id] = argmax_gold(ls);
  }

  // exact mode: realized node matches its gold counterpart only while the
  // executed prefix replays gold
  std::map<std::string, std::string> exact_identity;

  std::vector<double> immediate;
  std::set<std::string> consumed;
  std::size_t pair_index = 0;
  for (std::size_t k = 0; k < traj.records.size(); ++k) {
    const TrajectoryRecord& rec = traj.records[k];
    if (rec.action.kind == ActionKind::End) {
      bool exhausted = true;
      for (const auto& leaf : gold_leaves)
        if (!consumed.count(leaf)) exhausted = false;
      immediate.push_back(exhausted ? 1.0 : -1.0);
      continue;
    }

    double r = -1.0;
    if (aligned) {
      std::set<std::string> cand;
      for (const auto& premise : {rec.action.first, rec.action.second}) {
        auto it = leaves.find(premise);
        if (it != leaves.end())
          cand.insert(it->second.begin(), it->second.end());
        else if (classify_id(premise) == NodeKind::Fact)
          cand.insert(premise);
      }
      std::optional<std::string> target;
      if (static_cast<std::ptrdiff_t>(k) == last_pair &&
          !gold_bin.root_id.empty()) {
        target = gold_bin.root_id;
      } else {
        target = argmax_gold(cand);
      }
      if (target && gold_by_conclusion.count(*target)) {
        const ProofStep* gstep = gold_by_conclusion.at(*target);
        std::set<std::string> substituted;
        for (const auto& premise : {rec.action.first, rec.action.second}) {
          if (classify_id(premise) == NodeKind::Fact) {
            substituted.insert(premise);
          } else {
            auto it = realized_alignment.find(premise);
            if (it != realized_alignment.end() && it->second)
              substituted.insert(*it->second);
            else
              substituted.insert("\x01blank:" + premise);
          }
        }
        std::set<std::string> gold_premises(gstep->premises.begin(),
                                            gstep->premises.end());
        if (substituted == gold_premises) r = 1.0;
      }
    } else {
      if (pair_index < gold_bin.steps.size()) {
        const ProofStep& gstep = gold_bin.steps[pair_index];
        auto translate = [&](const std::string& id) -> std::string {
          if (classify_id(id) == NodeKind::Fact) return id;
          auto it = exact_identity.find(id);
          return it != exact_identity.end() ? it->second : "\x01unmatched:" + id;
        };
        std::set<std::string> sampled_premises{translate(rec.action.first),
                                               translate(rec.action.second)};
        std::set<std::string> gold_premises(gstep.premises.begin(),
                                            gstep.premises.end());
        if (sampled_premises == gold_premises) r = 1.0;
        // chronological identity follows the executed chain
        std::set<std::string> executed_premises{
            translate(rec.executed_action.first),
            translate(rec.executed_action.second)};
        if (executed_premises == gold_premises && !rec.conclusion_id.empty())
          exact_identity[rec.conclusion_id] = gstep.conclusion_id;
      }
    }
    immediate.push_back(r);

    consumed.insert(rec.executed_action.first);
    consumed.insert(rec.executed_action.second);
    ++pair_index;
  }

  std::vector<double> cumulative = discounted_cumulative(immediate, gamma);
  std::vector<StepReward> rewards(immediate.size());
  for (std::size_t i = 0; i < rewards.size(); ++i)
    rewards[i] = StepReward{immediate[i], cumulative[i]};
  return rewards;
}

}  // namespace entailrl
