#pragma once

#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "entailrl/common.hpp"
#include "entailrl/env.hpp"

namespace entailrl {

// Feature order (all values in [0,1], END actions use the zero vector):
//   0 guidance_f1        bag-overlap F1 of concatenated premises vs guidance
//   1 guidance_idf       IDF-weighted guidance-type overlap, idf over the fact pool
//   2 premise_f1         bag-overlap F1 between the two premises
//   3 guidance_coverage  fraction of guidance types present in the pair
//   4 any_intermediate   either premise is an intermediate
//   5 both_intermediate  both premises are intermediates
//   6 length             combined premise token count t, normalized t/(t+16)
//   7 novel_coverage     guidance types covered by the pair and by no other
//                        available node, as a fraction of guidance types
const std::array<std::string, kFeatureCount>& feature_names();

struct PolicyParams {
  std::array<double, kFeatureCount> weights{};
  double bias = 0.0;

  nlohmann::json to_json() const;
  static PolicyParams from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static PolicyParams load(const std::string& path);
};

FeatureVector featurize(const std::string& guidance_text, const Action& action,
                        const State& state);

// Same vectors as featurize() for each action, sharing tokenization work.
std::vector<FeatureVector> featurize_actions(const std::string& guidance_text,
                                             const std::vector<Action>& actions,
                                             const State& state);

// softmax(weights . f_i + bias) with max subtraction.
std::vector<double> score_actions(const PolicyParams& params,
                                  const std::vector<FeatureVector>& features);

// Inverse-CDF draw over the canonical action order.
int sample_action(const std::vector<double>& probs, std::mt19937_64& rng);

// Ties resolve to the lowest index.
int argmax_action(const std::vector<double>& probs);

struct Gradient {
  std::array<double, kFeatureCount> weights{};
  double bias = 0.0;
};

// d log pi(chosen) / d params = f_chosen - sum_i p_i f_i; the bias gradient
// vanishes by softmax shift invariance.
Gradient grad_log_prob(const PolicyParams& params,
                       const std::vector<FeatureVector>& features, int chosen);

enum class Baseline { None, BatchMean };
Baseline parse_baseline(const std::string& name);
const char* baseline_name(Baseline baseline);

struct ScoredTrajectory {
  const Trajectory* trajectory = nullptr;
  const std::vector<StepReward>* rewards = nullptr;
};

// (1/N) sum_n sum_k R_k^n grad log pi(a_k^n | s_k^n), optionally centering
// R by the batch mean.
Gradient accumulate_policy_gradient(const PolicyParams& params,
                                    const std::vector<ScoredTrajectory>& batch,
                                    Baseline baseline);

// One REINFORCE ascent step: params + lr * gradient.
PolicyParams policy_gradient_update(const PolicyParams& params,
                                    const std::vector<ScoredTrajectory>& batch,
                                    double lr, Baseline baseline);

}  // namespace entailrl
