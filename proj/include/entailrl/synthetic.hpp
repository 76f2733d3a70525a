#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "entailrl/env.hpp"
#include "entailrl/policy.hpp"

namespace entailrl::synthetic {

// Deterministic pronounceable token for a global index (distinct indexes
// yield distinct words).
std::string word(std::size_t index);

// Chain-shaped instances whose gold action has the strictly highest
// guidance-overlap feature in every teacher-forced state: the first two facts
// carry four hypothesis tokens each, later facts one hypothesis token plus
// increasing filler. All tokens are globally unique, so optional distractors
// (facts borrowed from sibling instances) share no vocabulary with the
// hypothesis.
std::vector<Instance> separable_corpus(int count, std::uint64_t seed,
                                       int distractors = 0);

// Hand weights that put nearly all probability mass on the gold action of
// separable instances; greedy decoding reconstructs their trees exactly.
PolicyParams oracle_params();

// Splits whose instance counts, step counts, and leaf-count distribution
// reproduce the published accounting of the reference dataset
// (1313/187/340 instances, 4175/597/1109 steps, and the fact-N retention
// fractions). which: "train" | "dev" | "test".
std::vector<Instance> official_shape_split(const std::string& which);

// 4-leaf instance whose misordered construction exercises the aligned
// reward: gold chains sent1+sent2 first, the scripted prediction starts
// with sent1+sent3.
Instance misordered_instance();
std::vector<std::pair<std::string, std::string>> misordered_actions();

// Replays a fixed pair sequence through the environment (log-probs zero).
Trajectory scripted_trajectory(const Instance& instance,
                               const std::vector<std::pair<std::string, std::string>>& pairs,
                               const RolloutConfig& cfg);

}  // namespace entailrl::synthetic
