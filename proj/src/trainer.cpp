#include "entailrl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace entailrl {

namespace {

int resolve_workers(int workers) {
#ifdef _OPENMP
  if (workers <= 0) return omp_get_max_threads();
  return workers;
#else
  (void)workers;
  return 1;
#endif
}

}  // namespace

void TrainConfig::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(gamma)) throw Error(ErrorCode::MalformedRecord, "gamma outside [0,1]");
  if (!in_unit(ss_start) || !in_unit(ss_end))
    throw Error(ErrorCode::MalformedRecord, "scheduled sampling rates outside [0,1]");
  if (ss_start < ss_end)
    throw Error(ErrorCode::MalformedRecord, "ss_start must be >= ss_end");
  if (trajectories_per_instance < 1)
    throw Error(ErrorCode::MalformedRecord, "trajectories_per_instance < 1");
  if (pretrain_epochs < 0 || rl_epochs < 0 || max_steps < 1)
    throw Error(ErrorCode::MalformedRecord, "negative epoch count or max_steps < 1");
}

nlohmann::json TrainConfig::to_json() const {
  return nlohmann::json{{"gamma", gamma},
                        {"lr", lr},
                        {"momentum", momentum},
                        {"pretrain_epochs", pretrain_epochs},
                        {"rl_epochs", rl_epochs},
                        {"trajectories_per_instance", trajectories_per_instance},
                        {"ss_start", ss_start},
                        {"ss_end", ss_end},
                        {"mode", setting_name(mode)},
                        {"seed", seed},
                        {"aligned_reward", aligned_reward},
                        {"baseline", baseline_name(baseline)},
                        {"in_hoc", in_hoc},
                        {"allow_reuse", allow_reuse},
                        {"max_steps", max_steps},
                        {"workers", workers},
                        {"filter_top_k", filter_top_k},
                        {"filter_threshold", filter_threshold},
                        {"apply_filter", apply_filter}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig cfg;
  cfg.gamma = j.value("gamma", cfg.gamma);
  cfg.lr = j.value("lr", cfg.lr);
  cfg.momentum = j.value("momentum", cfg.momentum);
  cfg.pretrain_epochs = j.value("pretrain_epochs", cfg.pretrain_epochs);
  cfg.rl_epochs = j.value("rl_epochs", cfg.rl_epochs);
  cfg.trajectories_per_instance =
      j.value("trajectories_per_instance", cfg.trajectories_per_instance);
  cfg.ss_start = j.value("ss_start", cfg.ss_start);
  cfg.ss_end = j.value("ss_end", cfg.ss_end);
  if (j.contains("mode")) cfg.mode = parse_setting(j["mode"].get<std::string>());
  cfg.seed = j.value("seed", cfg.seed);
  cfg.aligned_reward = j.value("aligned_reward", cfg.aligned_reward);
  if (j.contains("baseline"))
    cfg.baseline = parse_baseline(j["baseline"].get<std::string>());
  cfg.in_hoc = j.value("in_hoc", cfg.in_hoc);
  cfg.allow_reuse = j.value("allow_reuse", cfg.allow_reuse);
  cfg.max_steps = j.value("max_steps", cfg.max_steps);
  cfg.workers = j.value("workers", cfg.workers);
  cfg.filter_top_k = j.value("filter_top_k", cfg.filter_top_k);
  cfg.filter_threshold = j.value("filter_threshold", cfg.filter_threshold);
  cfg.apply_filter = j.value("apply_filter", cfg.apply_filter);
  cfg.validate();
  return cfg;
}

RolloutConfig TrainConfig::rollout_config(bool greedy) const {
  RolloutConfig rc;
  rc.setting = mode;
  rc.in_hoc = in_hoc;
  rc.greedy = greedy;
  rc.allow_reuse = allow_reuse;
  rc.max_steps = max_steps;
  return rc;
}

nlohmann::json EpochLog::to_json() const {
  return nlohmann::json{{"epoch", epoch},
                        {"ss_prob", ss_prob},
                        {"mean_total_reward", mean_total_reward},
                        {"dev_steps_f1", dev_steps_f1}};
}

namespace {

struct PretrainItem {
  std::vector<FeatureVector> features;
  int positive = -1;
};

std::vector<PretrainItem> prepare_pretrain_items(
    const std::vector<GoldStepExample>& examples) {
  std::vector<PretrainItem> items;
  items.reserve(examples.size());
  for (const auto& ex : examples) {
    State state;
    state.available = ex.state_node_ids;
    state.guidance_text = ex.hypothesis_text;
    state.texts = ex.node_texts;
    state.fact_pool_texts = ex.fact_pool_texts;

    RolloutConfig pairs_only;
    pairs_only.setting = TaskSetting::Task1;  // pair actions only
    std::vector<Action> actions = action_space(state, pairs_only);

    PretrainItem item;
    item.features = featurize_actions(state.guidance_text, actions, state);
    Action gold = Action::pair(ex.positive_action.first, ex.positive_action.second);
    for (std::size_t i = 0; i < actions.size(); ++i)
      if (actions[i] == gold) item.positive = static_cast<int>(i);
    if (item.positive < 0)
      throw Error(ErrorCode::InvalidAction,
                  "gold pair not in state action space");
    items.push_back(std::move(item));
  }
  return items;
}

double cross_entropy(const PolicyParams& params,
                     const std::vector<PretrainItem>& items) {
  if (items.empty()) return 0.0;
  double loss = 0.0;
  for (const auto& item : items) {
    std::vector<double> probs = score_actions(params, item.features);
    loss -= std::log(std::max(probs[item.positive], 1e-300));
  }
  return loss / static_cast<double>(items.size());
}

}  // namespace

PolicyParams pretrain(const PolicyParams& init,
                      const std::vector<GoldStepExample>& examples,
                      const TrainConfig& cfg,
                      const std::vector<GoldStepExample>* dev,
                      std::vector<double>* loss_log) {
  if (examples.empty()) return init;
  std::vector<PretrainItem> items = prepare_pretrain_items(examples);
  std::vector<PretrainItem> dev_items =
      dev ? prepare_pretrain_items(*dev) : items;

  PolicyParams params = init;
  PolicyParams best = params;
  double best_loss = cross_entropy(params, dev_items);
  if (loss_log) loss_log->push_back(cross_entropy(params, items));

  std::array<double, kFeatureCount> velocity{};
  for (int epoch = 0; epoch < cfg.pretrain_epochs; ++epoch) {
    std::array<double, kFeatureCount> grad{};
    for (const auto& item : items) {
      Gradient g = grad_log_prob(params, item.features, item.positive);
      for (std::size_t d = 0; d < kFeatureCount; ++d) grad[d] += g.weights[d];
    }
    double scale = 1.0 / static_cast<double>(items.size());
    for (std::size_t d = 0; d < kFeatureCount; ++d) {
      velocity[d] = cfg.momentum * velocity[d] + grad[d] * scale;
      params.weights[d] += cfg.lr * velocity[d];
      if (!std::isfinite(params.weights[d]))
        throw Error(ErrorCode::NonFiniteGradient, "pretraining diverged");
    }
    if (loss_log) loss_log->push_back(cross_entropy(params, items));
    double dev_loss = cross_entropy(params, dev_items);
    if (dev_loss < best_loss) {
      best_loss = dev_loss;
      best = params;
    }
  }
  return best;
}

double scheduled_sampling_prob(int epoch, const TrainConfig& cfg) {
  if (cfg.rl_epochs <= 1) return cfg.ss_start;
  double t = static_cast<double>(epoch) / static_cast<double>(cfg.rl_epochs - 1);
  return cfg.ss_start + (cfg.ss_end - cfg.ss_start) * t;
}

Trajectory sample_training_trajectory(const PolicyParams& params,
                                      const Instance& instance,
                                      const EntailmentTree& gold_binarized,
                                      double teacher_prob,
                                      const RolloutConfig& cfg,
                                      std::mt19937_64& rng) {
  Trajectory traj;
  traj.instance_id = instance.id;
  State state = init_state(instance, cfg);

  std::size_t gold_ptr = 0;
  std::map<std::string, std::string> gold_realized;  // gold id -> p{K}

  auto translate_gold_action = [&]() -> std::optional<Action> {
    if (gold_ptr >= gold_binarized.steps.size()) return std::nullopt;
    const ProofStep& gstep = gold_binarized.steps[gold_ptr];
    std::array<std::string, 2> ids;
    for (int i = 0; i < 2; ++i) {
      const std::string& gid = gstep.premises[i];
      if (classify_id(gid) == NodeKind::Fact) {
        ids[i] = gid;
      } else {
        auto it = gold_realized.find(gid);
        if (it == gold_realized.end()) return std::nullopt;
        ids[i] = it->second;
      }
    }
    if (!state.available.count(ids[0]) || !state.available.count(ids[1]) ||
        ids[0] == ids[1])
      return std::nullopt;
    return Action::pair(ids[0], ids[1]);
  };

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
    int chosen = sample_action(probs, rng);

    // the coin is drawn unconditionally so the rng stream does not depend
    // on teacher_prob
    double coin = (rng() >> 11) * 0x1.0p-53;

    TrajectoryRecord rec;
    rec.available_ids.assign(state.available.begin(), state.available.end());
    std::sort(rec.available_ids.begin(), rec.available_ids.end(), node_id_less);
    rec.action = actions[chosen];
    rec.executed_action = rec.action;
    rec.log_prob = std::log(probs[chosen]);
    rec.actions = std::move(actions);
    rec.action_features = std::move(features);
    rec.chosen_index = chosen;

    std::optional<Action> gold_action = translate_gold_action();
    if (coin < teacher_prob && gold_action) rec.executed_action = *gold_action;

    if (rec.executed_action.kind == ActionKind::End) {
      traj.records.push_back(std::move(rec));
      traj.terminal_reason = TerminalReason::EndToken;
      break;
    }
    state = step(state, rec.executed_action, cfg.deduce, cfg.allow_reuse);
    rec.conclusion_id = "p" + std::to_string(state.step_index);
    rec.conclusion_text = state.texts.at(rec.conclusion_id);

    // advance the gold pointer whenever the executed step realizes it
    if (gold_action && *gold_action == rec.executed_action) {
      gold_realized[gold_binarized.steps[gold_ptr].conclusion_id] =
          rec.conclusion_id;
      ++gold_ptr;
    }
    traj.records.push_back(std::move(rec));
  }

  if (!cfg.in_hoc) {
    for (auto it = traj.records.rbegin(); it != traj.records.rend(); ++it) {
      if (it->executed_action.kind == ActionKind::Pair) {
        it->conclusion_text = instance.hypothesis;
        break;
      }
    }
  }
  return traj;
}

std::vector<Trajectory> sample_batch_serial(const PolicyParams& params,
                                            const Instance& instance,
                                            const EntailmentTree& gold_binarized,
                                            double teacher_prob,
                                            const RolloutConfig& cfg,
                                            std::uint64_t base_seed, int n) {
  std::vector<Trajectory> batch(n);
  for (int i = 0; i < n; ++i) {
    std::mt19937_64 rng(base_seed + static_cast<std::uint64_t>(i));
    batch[i] = sample_training_trajectory(params, instance, gold_binarized,
                                          teacher_prob, cfg, rng);
  }
  return batch;
}

std::vector<Trajectory> sample_batch(const PolicyParams& params,
                                     const Instance& instance,
                                     const EntailmentTree& gold_binarized,
                                     double teacher_prob, const RolloutConfig& cfg,
                                     std::uint64_t base_seed, int n, int workers) {
  std::vector<Trajectory> batch(n);
  [[maybe_unused]] int threads = std::max(std::min(resolve_workers(workers), n), 1);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < n; ++i) {
    try {
      std::mt19937_64 rng(base_seed + static_cast<std::uint64_t>(i));
      batch[i] = sample_training_trajectory(params, instance, gold_binarized,
                                            teacher_prob, cfg, rng);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return batch;
}

std::vector<Instance> prepare_instances(const std::vector<Instance>& dataset,
                                        TaskSetting mode, bool apply_filter,
                                        std::size_t top_k, double threshold) {
  std::vector<Instance> prepared;
  prepared.reserve(dataset.size());
  for (const auto& inst : dataset) {
    Instance copy = inst;
    copy.setting = mode;
    if (mode != TaskSetting::Task1 && apply_filter)
      copy = filter_facts(copy, lexical_relevance, top_k, threshold);
    prepared.push_back(std::move(copy));
  }
  return prepared;
}

TrainResult train_rl(const PolicyParams& init, const std::vector<Instance>& train,
                     const TrainConfig& cfg, const std::vector<Instance>* dev,
                     const EpochCallback& on_epoch) {
  cfg.validate();
  TrainResult result;
  result.pretrained = init;
  result.params = init;

  std::vector<Instance> instances = prepare_instances(
      train, cfg.mode, cfg.apply_filter, cfg.filter_top_k, cfg.filter_threshold);
  std::vector<EntailmentTree> gold_bin;
  gold_bin.reserve(instances.size());
  for (const auto& inst : instances) gold_bin.push_back(binarize(inst.gold_tree));

  EvalOptions dev_opts;
  dev_opts.mode = cfg.mode;
  dev_opts.in_hoc = cfg.in_hoc;
  dev_opts.gamma = cfg.gamma;
  dev_opts.max_steps = cfg.max_steps;
  dev_opts.workers = cfg.workers;
  dev_opts.filter_top_k = cfg.filter_top_k;
  dev_opts.filter_threshold = cfg.filter_threshold;
  dev_opts.apply_filter = cfg.apply_filter;
  const std::vector<Instance>& dev_set = dev ? *dev : train;

  RolloutConfig rollcfg = cfg.rollout_config(/*greedy=*/false);
  const int n = cfg.trajectories_per_instance;
  std::array<double, kFeatureCount> velocity{};

  for (int epoch = 0; epoch < cfg.rl_epochs; ++epoch) {
    double teacher_prob = scheduled_sampling_prob(epoch, cfg);
    double reward_sum = 0.0;
    std::size_t traj_count = 0;

    for (std::size_t i = 0; i < instances.size(); ++i) {
      std::uint64_t base_seed =
          cfg.seed +
          (static_cast<std::uint64_t>(epoch) * instances.size() + i) *
              static_cast<std::uint64_t>(n);
      std::vector<Trajectory> batch =
          sample_batch(result.params, instances[i], gold_bin[i], teacher_prob,
                       rollcfg, base_seed, n, cfg.workers);

      std::vector<std::vector<StepReward>> rewards(batch.size());
      for (std::size_t b = 0; b < batch.size(); ++b) {
        rewards[b] = assign_rewards(batch[b], gold_bin[i], cfg.gamma,
                                    cfg.aligned_reward);
        reward_sum += trajectory_total(rewards[b]);
        ++traj_count;
      }

      std::vector<ScoredTrajectory> scored;
      scored.reserve(batch.size());
      for (std::size_t b = 0; b < batch.size(); ++b)
        scored.push_back(ScoredTrajectory{&batch[b], &rewards[b]});

      Gradient grad =
          accumulate_policy_gradient(result.params, scored, cfg.baseline);
      for (std::size_t d = 0; d < kFeatureCount; ++d) {
        velocity[d] = cfg.momentum * velocity[d] + grad.weights[d];
        result.params.weights[d] += cfg.lr * velocity[d];
        if (!std::isfinite(result.params.weights[d]))
          throw Error(ErrorCode::NonFiniteGradient, "RL update diverged");
      }
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.ss_prob = teacher_prob;
    entry.mean_total_reward =
        traj_count ? reward_sum / static_cast<double>(traj_count) : 0.0;
    entry.dev_steps_f1 =
        evaluate(result.params, dev_set, dev_opts).corpus.steps_f1;
    result.log.push_back(entry);
    if (on_epoch) on_epoch(result.params, entry);
  }
  return result;
}

nlohmann::json EvalResult::to_json() const {
  nlohmann::json out;
  out["corpus"] = corpus.to_json();
  out["mean_total_reward"] = mean_total_reward;
  out["instances"] = nlohmann::json::array();
  for (const auto& inst : instances) {
    out["instances"].push_back(nlohmann::json{{"id", inst.id},
                                              {"metrics", inst.report.to_json()},
                                              {"total_reward", inst.total_reward},
                                              {"proof", inst.predicted_proof}});
  }
  return out;
}

namespace {

InstanceEval evaluate_instance(const PolicyParams& params, const Instance& inst,
                               const EvalOptions& opts) {
  RolloutConfig rollcfg;
  rollcfg.setting = opts.mode;
  rollcfg.in_hoc = opts.in_hoc;
  rollcfg.greedy = true;
  rollcfg.max_steps = opts.max_steps;
  rollcfg.deduce = opts.deduce;

  std::mt19937_64 rng(0);  // unused under greedy decoding
  Trajectory traj = rollout(params, inst, rollcfg, rng);
  EntailmentTree pred = trajectory_to_tree(traj, inst, opts.in_hoc);

  InstanceEval eval;
  eval.id = inst.id;
  eval.report = score_tree(pred, inst.gold_tree, opts.sim);
  eval.total_reward = trajectory_total(
      assign_rewards(traj, inst.gold_tree, opts.gamma, opts.aligned_reward));
  eval.predicted_proof = pred.steps.empty() ? "" : serialize_proof(pred);
  eval.trajectory = traj.to_json();
  return eval;
}

EvalResult finalize_eval(std::vector<InstanceEval> evals) {
  EvalResult result;
  std::vector<MetricReport> reports;
  reports.reserve(evals.size());
  double reward_sum = 0.0;
  for (const auto& e : evals) {
    reports.push_back(e.report);
    reward_sum += e.total_reward;
  }
  result.corpus = aggregate(std::move(reports));
  result.mean_total_reward =
      evals.empty() ? 0.0 : reward_sum / static_cast<double>(evals.size());
  result.instances = std::move(evals);
  return result;
}

}  // namespace

EvalResult evaluate_serial(const PolicyParams& params,
                           const std::vector<Instance>& dataset,
                           const EvalOptions& opts) {
  std::vector<Instance> prepared = prepare_instances(
      dataset, opts.mode, opts.apply_filter, opts.filter_top_k,
      opts.filter_threshold);
  std::vector<InstanceEval> evals(prepared.size());
  for (std::size_t i = 0; i < prepared.size(); ++i)
    evals[i] = evaluate_instance(params, prepared[i], opts);
  return finalize_eval(std::move(evals));
}

EvalResult evaluate(const PolicyParams& params,
                    const std::vector<Instance>& dataset,
                    const EvalOptions& opts) {
  std::vector<Instance> prepared = prepare_instances(
      dataset, opts.mode, opts.apply_filter, opts.filter_top_k,
      opts.filter_threshold);
  std::vector<InstanceEval> evals(prepared.size());
  [[maybe_unused]] int threads = std::max(resolve_workers(opts.workers), 1);
  std::ptrdiff_t count = static_cast<std::ptrdiff_t>(prepared.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      evals[i] = evaluate_instance(params, prepared[i], opts);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return finalize_eval(std::move(evals));
}

}  // namespace entailrl
