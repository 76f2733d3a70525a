#include <doctest.h>

#include <random>

#include "entailrl/env.hpp"
#include "entailrl/synthetic.hpp"
#include "entailrl/trainer.hpp"
#include "support/oracles.hpp"

using namespace entailrl;

namespace {

Instance three_fact_instance() {
  Instance inst;
  inst.id = "t3";
  inst.facts = {{"sent1", "alpha beta"}, {"sent2", "gamma delta"}, {"sent3", "epsilon"}};
  inst.hypothesis = "alpha beta gamma delta epsilon";
  inst.question = "why alpha";
  inst.answer = "epsilon";
  std::vector<ProofStep> steps = {
      ProofStep{{"sent1", "sent2"}, "int1",
                rule_based_deduce("alpha beta", "gamma delta")},
      ProofStep{{"int1", "sent3"}, kHypothesisId, ""},
  };
  inst.gold_tree = make_tree(steps, inst.facts, inst.hypothesis);
  return inst;
}

}  // namespace

TEST_CASE("init_state") {
  Instance inst = three_fact_instance();
  RolloutConfig cfg;
  State s = init_state(inst, cfg);
  CHECK(s.available == std::set<std::string>{"sent1", "sent2", "sent3"});
  CHECK(s.step_index == 0);
  CHECK(s.guidance_text == inst.hypothesis);

  RolloutConfig in_hoc = cfg;
  in_hoc.in_hoc = true;
  CHECK(init_state(inst, in_hoc).guidance_text == inst.question);

  Instance empty;
  empty.id = "empty";
  CHECK_THROWS_AS(init_state(empty, cfg), Error);
}

TEST_CASE("action_space") {
  RolloutConfig task1;
  State s;
  s.available = {"sent1", "sent2", "sent3", "sent4"};
  for (const auto& id : s.available) s.texts[id] = "text";

  CHECK(action_space(s, task1).size() == 6);  // C(4,2)

  RolloutConfig task2 = task1;
  task2.setting = TaskSetting::Task2;
  CHECK(action_space(s, task2).size() == 6);  // END needs step_index >= 1
  s.step_index = 1;
  CHECK(action_space(s, task2).size() == 7);
  CHECK(action_space(s, task2).back().kind == ActionKind::End);

  State two;
  two.available = {"p1", "sent3"};
  two.step_index = 1;
  CHECK(action_space(two, task2).size() == 2);

  State one;
  one.available = {"sent1"};
  CHECK(action_space(one, task1).empty());
}

TEST_CASE("action_space is in canonical numeric-aware order") {
  RolloutConfig cfg;
  State s;
  s.available = {"sent10", "sent2", "p1"};
  auto actions = action_space(s, cfg);
  REQUIRE(actions.size() == 3);
  CHECK(actions[0].first == "sent2");
  CHECK(actions[0].second == "sent10");
  CHECK(actions[1].first == "sent2");
  CHECK(actions[1].second == "p1");
  CHECK(actions[2].first == "sent10");
  CHECK(actions[2].second == "p1");
}

TEST_CASE("step transitions") {
  Instance inst = three_fact_instance();
  RolloutConfig cfg;
  State s = init_state(inst, cfg);

  State next = step(s, Action::pair("sent1", "sent2"), {});
  CHECK(next.available == std::set<std::string>{"p1", "sent3"});
  CHECK(next.step_index == 1);
  CHECK(next.texts.at("p1") == "alpha beta and gamma delta");
  // source state untouched
  CHECK(s.available.size() == 3);

  State ended = step(next, Action::end(), {});
  CHECK(ended.terminal);
  CHECK(ended.available == next.available);

  CHECK_THROWS_AS(step(next, Action::pair("sent1", "sent2"), {}), Error);
  CHECK_THROWS_AS(step(ended, Action::pair("p1", "sent3"), {}), Error);
}

TEST_CASE("allow_reuse keeps consumed premises available") {
  Instance inst = three_fact_instance();
  RolloutConfig cfg;
  State s = init_state(inst, cfg);
  State next = step(s, Action::pair("sent1", "sent2"), {}, /*allow_reuse=*/true);
  CHECK(next.available ==
        std::set<std::string>{"p1", "sent1", "sent2", "sent3"});
}

TEST_CASE("teacher-forced replay of gold actions reconstructs gold structure") {
  Instance inst = three_fact_instance();
  RolloutConfig cfg;
  Trajectory traj = synthetic::scripted_trajectory(
      inst, {{"sent1", "sent2"}, {"p1", "sent3"}}, cfg);
  EntailmentTree pred = trajectory_to_tree(traj, inst, false);
  AlignmentMap amap = align(pred, inst.gold_tree);
  auto [f1, allcorrect] = score_steps(pred, inst.gold_tree, amap);
  CHECK(f1 == 1.0);
  CHECK(allcorrect == 1);
}

TEST_CASE("rollout lengths in task1") {
  RolloutConfig cfg;
  PolicyParams params;
  std::mt19937_64 rng(5);

  Instance two;
  two.id = "two";
  two.facts = {{"sent1", "a"}, {"sent2", "b"}};
  two.hypothesis = "a b";
  CHECK(rollout(params, two, cfg, rng).records.size() == 1);

  for (int n = 3; n <= 7; ++n) {
    Instance inst;
    inst.id = "n" + std::to_string(n);
    for (int i = 1; i <= n; ++i)
      inst.facts["sent" + std::to_string(i)] = "word" + std::to_string(i);
    inst.hypothesis = "words";
    Trajectory traj = rollout(params, inst, cfg, rng);
    CHECK(traj.records.size() == static_cast<std::size_t>(n - 1));
    CHECK(traj.terminal_reason == TerminalReason::SingleNodeLeft);
  }
}

TEST_CASE("rollout respects max_steps") {
  RolloutConfig cfg;
  cfg.max_steps = 2;
  PolicyParams params;
  std::mt19937_64 rng(5);
  Instance inst;
  inst.id = "big";
  for (int i = 1; i <= 8; ++i)
    inst.facts["sent" + std::to_string(i)] = "word" + std::to_string(i);
  inst.hypothesis = "words";
  Trajectory traj = rollout(params, inst, cfg, rng);
  CHECK(traj.records.size() == 2);
  CHECK(traj.terminal_reason == TerminalReason::MaxSteps);
}

TEST_CASE("seeded rollouts are byte-identical") {
  Instance inst = three_fact_instance();
  RolloutConfig cfg;
  PolicyParams params;
  params.weights[0] = 0.3;
  std::mt19937_64 rng_a(42), rng_b(42);
  Trajectory a = rollout(params, inst, cfg, rng_a);
  Trajectory b = rollout(params, inst, cfg, rng_b);
  CHECK(a.to_json().dump() == b.to_json().dump());
}

TEST_CASE("default-mode rollouts attach the hypothesis as the root label") {
  Instance inst = three_fact_instance();
  RolloutConfig cfg;
  PolicyParams params;
  std::mt19937_64 rng(9);
  Trajectory traj = rollout(params, inst, cfg, rng);
  CHECK(traj.records.back().conclusion_text == inst.hypothesis);

  RolloutConfig in_hoc = cfg;
  in_hoc.in_hoc = true;
  std::mt19937_64 rng2(9);
  Trajectory t2 = rollout(params, inst, in_hoc, rng2);
  CHECK(t2.records.back().conclusion_text != inst.hypothesis);
  CHECK(t2.records.back().conclusion_text.find(" and ") != std::string::npos);
}

TEST_CASE("assign_rewards on a perfect trajectory") {
  Instance inst = three_fact_instance();
  RolloutConfig cfg;
  Trajectory traj = synthetic::scripted_trajectory(
      inst, {{"sent1", "sent2"}, {"p1", "sent3"}}, cfg);
  auto rewards = assign_rewards(traj, inst.gold_tree, 0.9);
  REQUIRE(rewards.size() == 2);
  CHECK(rewards[0].immediate == 1.0);
  CHECK(rewards[1].immediate == 1.0);
  CHECK(rewards[0].cumulative == doctest::Approx(1.9).epsilon(1e-12));
  CHECK(rewards[1].cumulative == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("assign_rewards on the misordered fixture") {
  Instance inst = synthetic::misordered_instance();
  RolloutConfig cfg;
  Trajectory traj =
      synthetic::scripted_trajectory(inst, synthetic::misordered_actions(), cfg);

  SUBCASE("aligned rewards recover the final step") {
    auto rewards = assign_rewards(traj, inst.gold_tree, 0.9, /*aligned=*/true);
    REQUIRE(rewards.size() == 3);
    CHECK(rewards[0].immediate == -1.0);
    CHECK(rewards[1].immediate == -1.0);
    CHECK(rewards[2].immediate == 1.0);
    CHECK(rewards[0].cumulative == doctest::Approx(-1.09).epsilon(1e-9));
    CHECK(rewards[1].cumulative == doctest::Approx(-0.10).epsilon(1e-9));
    CHECK(rewards[2].cumulative == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("exact-match ablation penalizes every step") {
    auto rewards = assign_rewards(traj, inst.gold_tree, 0.9, /*aligned=*/false);
    for (const auto& r : rewards) {
      CHECK(r.immediate == -1.0);
      CHECK(r.cumulative < 0.0);
    }
  }
  SUBCASE("gamma zero reduces cumulative to immediate") {
    auto rewards = assign_rewards(traj, inst.gold_tree, 0.0);
    for (const auto& r : rewards) CHECK(r.cumulative == r.immediate);
  }
}

TEST_CASE("exact-match rewards accept a faithful chronological replay") {
  Instance inst = synthetic::misordered_instance();
  RolloutConfig cfg;
  Trajectory traj = synthetic::scripted_trajectory(
      inst, {{"sent1", "sent2"}, {"p1", "sent3"}, {"p2", "sent4"}}, cfg);
  auto rewards = assign_rewards(traj, inst.gold_tree, 0.9, /*aligned=*/false);
  for (const auto& r : rewards) CHECK(r.immediate == 1.0);
}

TEST_CASE("END reward depends on gold-leaf exhaustion") {
  Instance inst = three_fact_instance();
  inst.facts["sent4"] = "distractor zzz";
  inst.setting = TaskSetting::Task2;
  RolloutConfig cfg;
  cfg.setting = TaskSetting::Task2;

  auto run_with_end = [&](const std::vector<std::pair<std::string, std::string>>& pairs) {
    Trajectory traj = synthetic::scripted_trajectory(inst, pairs, cfg);
    TrajectoryRecord end_rec;
    State replay = init_state(inst, cfg);
    end_rec.available_ids.assign(replay.available.begin(), replay.available.end());
    end_rec.action = Action::end();
    end_rec.executed_action = Action::end();
    traj.records.push_back(end_rec);
    traj.terminal_reason = TerminalReason::EndToken;
    return assign_rewards(traj, inst.gold_tree, 0.9);
  };

  // all gold leaves consumed before END -> +1
  auto exhausted = run_with_end({{"sent1", "sent2"}, {"p1", "sent3"}});
  CHECK(exhausted.back().immediate == 1.0);

  // sent3 still unused -> -1
  auto premature = run_with_end({{"sent1", "sent2"}, {"p1", "sent4"}});
  CHECK(premature.back().immediate == -1.0);
}

TEST_CASE("reward closed forms on random trajectories") {
  std::mt19937_64 rng(311);
  for (int trial = 0; trial < 200; ++trial) {
    auto facts = oracles::numbered_facts(2 + static_cast<int>(rng() % 5));
    Instance inst;
    inst.id = "r" + std::to_string(trial);
    inst.facts = facts;
    inst.hypothesis = "random hypothesis";
    inst.gold_tree = oracles::random_binary_tree(facts, rng, inst.hypothesis);

    RolloutConfig cfg;
    PolicyParams params;
    std::mt19937_64 roll_rng(1000 + trial);
    Trajectory traj = rollout(params, inst, cfg, roll_rng);
    double gamma = (trial % 3 == 0) ? 0.0 : (trial % 3 == 1 ? 0.9 : 0.99);
    auto rewards = assign_rewards(traj, inst.gold_tree, gamma);

    for (std::size_t k = 0; k < rewards.size(); ++k) {
      double expected = 0.0;
      double factor = 1.0;
      for (std::size_t i = k; i < rewards.size(); ++i) {
        expected += factor * rewards[i].immediate;
        factor *= gamma;
      }
      CHECK(std::abs(rewards[k].cumulative - expected) < 1e-12);
    }
  }
}

TEST_CASE("all-positive reward geometric sum") {
  Instance inst = three_fact_instance();
  RolloutConfig cfg;
  for (double gamma : {0.5, 0.9, 0.99}) {
    Trajectory traj = synthetic::scripted_trajectory(
        inst, {{"sent1", "sent2"}, {"p1", "sent3"}}, cfg);
    auto rewards = assign_rewards(traj, inst.gold_tree, gamma);
    double k = static_cast<double>(rewards.size());
    CHECK(std::abs(rewards[0].cumulative -
                   (1.0 - std::pow(gamma, k)) / (1.0 - gamma)) < 1e-12);
  }
}

TEST_CASE("trajectory serializes to JSON") {
  Instance inst = three_fact_instance();
  RolloutConfig cfg;
  Trajectory traj = synthetic::scripted_trajectory(
      inst, {{"sent1", "sent2"}, {"p1", "sent3"}}, cfg);
  nlohmann::json j = traj.to_json();
  CHECK(j["instance_id"] == "t3");
  CHECK(j["records"].size() == 2);
  CHECK(j["records"][0]["state"].size() == 3);
  CHECK(j["terminal_reason"] == "single_node_left");
}
