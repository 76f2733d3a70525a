#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "entailrl/env.hpp"
#include "entailrl/metrics.hpp"
#include "entailrl/policy.hpp"

namespace entailrl {

struct TrainConfig {
  double gamma = 0.99;
  double lr = 1e-3;
  double momentum = 0.0;
  int pretrain_epochs = 20;
  int rl_epochs = 20;
  int trajectories_per_instance = 4;  // N of the sampled-gradient estimate
  double ss_start = 1.0;              // teacher-forcing probability schedule
  double ss_end = 0.5;
  TaskSetting mode = TaskSetting::Task1;
  std::uint64_t seed = 7;
  bool aligned_reward = true;
  Baseline baseline = Baseline::None;
  bool in_hoc = false;
  bool allow_reuse = false;
  int max_steps = 100;
  int workers = 0;  // 0 = all cores
  std::size_t filter_top_k = 5;
  double filter_threshold = 0.35;
  bool apply_filter = true;  // fact filter for task2/task3

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
  RolloutConfig rollout_config(bool greedy) const;
};

struct EpochLog {
  int epoch = 0;
  double ss_prob = 0.0;
  double mean_total_reward = 0.0;
  double dev_steps_f1 = 0.0;

  nlohmann::json to_json() const;
};

struct TrainResult {
  PolicyParams pretrained;
  PolicyParams params;
  std::vector<EpochLog> log;
};

// Full-batch cross-entropy descent on the gold pair under the softmax over
// each teacher-forced state's pair space. Returns the parameters with the
// lowest dev loss (dev defaults to the training examples).
PolicyParams pretrain(const PolicyParams& init,
                      const std::vector<GoldStepExample>& examples,
                      const TrainConfig& cfg,
                      const std::vector<GoldStepExample>* dev = nullptr,
                      std::vector<double>* loss_log = nullptr);

// Linear decay from ss_start at epoch 0 to ss_end at the final epoch.
double scheduled_sampling_prob(int epoch, const TrainConfig& cfg);

// One training rollout. Every step samples an action from the policy (that
// action's log-prob and reward feed the gradient); with probability
// teacher_prob the transition instead follows the next gold step, replayed
// in order, whenever its premises are still available.
Trajectory sample_training_trajectory(const PolicyParams& params,
                                      const Instance& instance,
                                      const EntailmentTree& gold_binarized,
                                      double teacher_prob,
                                      const RolloutConfig& cfg,
                                      std::mt19937_64& rng);

// N rollouts with per-trajectory rng streams (seed = base_seed + index).
std::vector<Trajectory> sample_batch_serial(const PolicyParams& params,
                                            const Instance& instance,
                                            const EntailmentTree& gold_binarized,
                                            double teacher_prob,
                                            const RolloutConfig& cfg,
                                            std::uint64_t base_seed, int n);

// OpenMP variant; identical output to sample_batch_serial for any worker count.
std::vector<Trajectory> sample_batch(const PolicyParams& params,
                                     const Instance& instance,
                                     const EntailmentTree& gold_binarized,
                                     double teacher_prob, const RolloutConfig& cfg,
                                     std::uint64_t base_seed, int n, int workers);

using EpochCallback = std::function<void(const PolicyParams&, const EpochLog&)>;

// REINFORCE over the prepared dataset; one update per instance per epoch.
TrainResult train_rl(const PolicyParams& init, const std::vector<Instance>& train,
                     const TrainConfig& cfg,
                     const std::vector<Instance>* dev = nullptr,
                     const EpochCallback& on_epoch = {});

struct EvalOptions {
  SimilarityConfig sim;
  TaskSetting mode = TaskSetting::Task1;
  bool in_hoc = false;
  bool aligned_reward = true;  // reward diagnostics mode
  double gamma = 0.99;
  int max_steps = 100;
  int workers = 0;
  std::size_t filter_top_k = 5;
  double filter_threshold = 0.35;
  bool apply_filter = true;
  DeduceFn deduce;  // empty = rule-based
};

struct InstanceEval {
  std::string id;
  MetricReport report;
  double total_reward = 0.0;
  std::string predicted_proof;
  nlohmann::json trajectory;  // replay record (states, actions, log-probs)
};

struct EvalResult {
  CorpusReport corpus;
  double mean_total_reward = 0.0;
  std::vector<InstanceEval> instances;

  nlohmann::json to_json() const;
};

// Applies the task setting tag and, for task2/task3, the fact filter.
std::vector<Instance> prepare_instances(const std::vector<Instance>& dataset,
                                        TaskSetting mode, bool apply_filter,
                                        std::size_t top_k, double threshold);

// Greedy decoding, alignment, and the four metrics per instance. The serial
// version is the reference; evaluate() runs instances under OpenMP and must
// produce identical results for any worker count.
EvalResult evaluate_serial(const PolicyParams& params,
                           const std::vector<Instance>& dataset,
                           const EvalOptions& opts);
EvalResult evaluate(const PolicyParams& params,
                    const std::vector<Instance>& dataset, const EvalOptions& opts);

}  // namespace entailrl
