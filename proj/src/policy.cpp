#include "entailrl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "entailrl/text.hpp"

namespace entailrl {

const std::array<std::string, kFeatureCount>& feature_names() {
  static const std::array<std::string, kFeatureCount> names = {
      "guidance_f1",      "guidance_idf",      "premise_f1",
      "guidance_coverage", "any_intermediate", "both_intermediate",
      "length",           "novel_coverage"};
  return names;
}

nlohmann::json PolicyParams::to_json() const {
  nlohmann::json names = nlohmann::json::array();
  for (const auto& n : feature_names()) names.push_back(n);
  return nlohmann::json{{"feature_names", names},
                        {"weights", weights},
                        {"bias", bias},
                        {"version", kArtifactVersion}};
}

PolicyParams PolicyParams::from_json(const nlohmann::json& j) {
  PolicyParams params;
  if (!j.contains("weights") || !j["weights"].is_array() ||
      j["weights"].size() != kFeatureCount)
    throw Error(ErrorCode::MalformedRecord, "checkpoint weights missing or wrong size");
  for (std::size_t i = 0; i < kFeatureCount; ++i)
    params.weights[i] = j["weights"][i].get<double>();
  params.bias = j.value("bias", 0.0);
  return params;
}

void PolicyParams::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << to_json().dump(2) << "\n";
}

PolicyParams PolicyParams::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded())
    throw Error(ErrorCode::MalformedRecord, "checkpoint is not valid JSON: " + path);
  return from_json(j);
}

namespace {

struct StateFeatureContext {
  std::vector<std::string> guidance_tokens;
  std::set<std::string> guidance_types;
  IdfTable idf;
  double guidance_idf_sum = 0.0;
  std::map<std::string, std::vector<std::string>> node_tokens;
  std::map<std::string, std::set<std::string>> node_types;
  // how many available nodes cover each guidance type
  std::map<std::string, int> guidance_cover_count;

  StateFeatureContext(const std::string& guidance, const State& state) {
    guidance_tokens = tokenize(guidance);
    guidance_types = token_types(guidance_tokens);
    idf = IdfTable::from_texts(state.fact_pool_texts);
    guidance_idf_sum = idf.sum(guidance_types);
    for (const auto& id : state.available) {
      auto tokens = tokenize(state.texts.at(id));
      node_types[id] = token_types(tokens);
      node_tokens[id] = std::move(tokens);
    }
    for (const auto& t : guidance_types) {
      int count = 0;
      for (const auto& [id, types] : node_types) count += types.count(t);
      guidance_cover_count[t] = count;
    }
  }
};

FeatureVector featurize_pair(const StateFeatureContext& ctx, const Action& action) {
  FeatureVector f{};
  const auto& tokens_a = ctx.node_tokens.at(action.first);
  const auto& tokens_b = ctx.node_tokens.at(action.second);
  std::vector<std::string> pair_tokens = tokens_a;
  pair_tokens.insert(pair_tokens.end(), tokens_b.begin(), tokens_b.end());
  std::set<std::string> pair_types = token_types(pair_tokens);

  f[0] = token_f1(pair_tokens, ctx.guidance_tokens);

  if (ctx.guidance_idf_sum > 0.0) {
    double covered = 0.0;
    for (const auto& t : ctx.guidance_types)
      if (pair_types.count(t)) covered += ctx.idf.idf(t);
    f[1] = covered / ctx.guidance_idf_sum;
  }

  f[2] = token_f1(tokens_a, tokens_b);
  f[3] = type_coverage(ctx.guidance_types, pair_types);

  bool a_int = classify_id(action.first) == NodeKind::Intermediate;
  bool b_int = classify_id(action.second) == NodeKind::Intermediate;
  f[4] = (a_int || b_int) ? 1.0 : 0.0;
  f[5] = (a_int && b_int) ? 1.0 : 0.0;

  double combined = static_cast<double>(tokens_a.size() + tokens_b.size());
  f[6] = combined / (combined + 16.0);

  if (!ctx.guidance_types.empty()) {
    const auto& types_a = ctx.node_types.at(action.first);
    const auto& types_b = ctx.node_types.at(action.second);
    int novel = 0;
    for (const auto& t : ctx.guidance_types) {
      if (!pair_types.count(t)) continue;
      int outside = ctx.guidance_cover_count.at(t) - types_a.count(t) -
                    static_cast<int>(types_b.count(t));
      if (outside <= 0) ++novel;
    }
    f[7] = static_cast<double>(novel) / static_cast<double>(ctx.guidance_types.size());
  }
  return f;
}

}  // namespace

FeatureVector featurize(const std::string& guidance_text, const Action& action,
                        const State& state) {
  if (action.kind == ActionKind::End) return FeatureVector{};  // reserved constant
  StateFeatureContext ctx(guidance_text, state);
  return featurize_pair(ctx, action);
}

std::vector<FeatureVector> featurize_actions(const std::string& guidance_text,
                                             const std::vector<Action>& actions,
                                             const State& state) {
  StateFeatureContext ctx(guidance_text, state);
  std::vector<FeatureVector> features;
  features.reserve(actions.size());
  for (const auto& action : actions) {
    if (action.kind == ActionKind::End) {
      features.push_back(FeatureVector{});
    } else {
      features.push_back(featurize_pair(ctx, action));
    }
  }
  return features;
}

std::vector<double> score_actions(const PolicyParams& params,
                                  const std::vector<FeatureVector>& features) {
  if (features.empty())
    throw Error(ErrorCode::InvalidAction, "empty action space");
  std::vector<double> logits(features.size(), params.bias);
  for (std::size_t i = 0; i < features.size(); ++i)
    for (std::size_t d = 0; d < kFeatureCount; ++d)
      logits[i] += params.weights[d] * features[i][d];

  double max_logit = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& l : logits) {
    l = std::exp(l - max_logit);
    total += l;
  }
  for (double& l : logits) l /= total;
  return logits;
}

int sample_action(const std::vector<double>& probs, std::mt19937_64& rng) {
  double total = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0)
      throw Error(ErrorCode::DegenerateDistribution, "bad probability");
    total += p;
  }
  if (!(total > 0.0) || std::abs(total - 1.0) > 1e-6)
    throw Error(ErrorCode::DegenerateDistribution,
                "probabilities sum to " + std::to_string(total));

  // 53-bit uniform in [0,1); platform-independent given the engine
  double u = (rng() >> 11) * 0x1.0p-53;
  double cdf = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cdf += probs[i];
    if (u < cdf) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size() - 1);
}

int argmax_action(const std::vector<double>& probs) {
  if (probs.empty())
    throw Error(ErrorCode::DegenerateDistribution, "empty distribution");
  int best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i)
    if (probs[i] > probs[best]) best = static_cast<int>(i);
  return best;
}

Gradient grad_log_prob(const PolicyParams& params,
                       const std::vector<FeatureVector>& features, int chosen) {
  std::vector<double> probs = score_actions(params, features);
  Gradient grad;
  for (std::size_t d = 0; d < kFeatureCount; ++d) {
    double expected = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i)
      expected += probs[i] * features[i][d];
    grad.weights[d] = features[chosen][d] - expected;
  }
  grad.bias = 0.0;
  return grad;
}

Baseline parse_baseline(const std::string& name) {
  if (name == "none") return Baseline::None;
  if (name == "batch_mean") return Baseline::BatchMean;
  throw Error(ErrorCode::MalformedRecord, "unknown baseline: " + name);
}

const char* baseline_name(Baseline baseline) {
  return baseline == Baseline::BatchMean ? "batch_mean" : "none";
}

Gradient accumulate_policy_gradient(const PolicyParams& params,
                                    const std::vector<ScoredTrajectory>& batch,
                                    Baseline baseline) {
  double reward_mean = 0.0;
  if (baseline == Baseline::BatchMean) {
    std::size_t count = 0;
    for (const auto& item : batch) {
      for (const auto& r : *item.rewards) {
        reward_mean += r.cumulative;
        ++count;
      }
    }
    if (count > 0) reward_mean /= static_cast<double>(count);
  }

  Gradient grad;
  if (batch.empty()) return grad;
  for (const auto& item : batch) {
    const Trajectory& traj = *item.trajectory;
    const std::vector<StepReward>& rewards = *item.rewards;
    for (std::size_t k = 0; k < traj.records.size(); ++k) {
      const TrajectoryRecord& rec = traj.records[k];
      Gradient step_grad =
          grad_log_prob(params, rec.action_features, rec.chosen_index);
      double weight = rewards[k].cumulative - reward_mean;
      for (std::size_t d = 0; d < kFeatureCount; ++d)
        grad.weights[d] += weight * step_grad.weights[d];
    }
  }
  double scale = 1.0 / static_cast<double>(batch.size());
  for (auto& w : grad.weights) {
    w *= scale;
    if (!std::isfinite(w))
      throw Error(ErrorCode::NonFiniteGradient, "policy gradient diverged");
  }
  return grad;
}

PolicyParams policy_gradient_update(const PolicyParams& params,
                                    const std::vector<ScoredTrajectory>& batch,
                                    double lr, Baseline baseline) {
  Gradient grad = accumulate_policy_gradient(params, batch, baseline);
  PolicyParams next = params;
  for (std::size_t d = 0; d < kFeatureCount; ++d)
    next.weights[d] += lr * grad.weights[d];
  next.bias += lr * grad.bias;
  return next;
}

}  // namespace entailrl
