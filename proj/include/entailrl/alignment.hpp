#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "entailrl/tree.hpp"

namespace entailrl {

// Predicted intermediate -> gold node; nullopt is the blank node.
struct AlignmentMap {
  std::map<std::string, std::optional<std::string>> mapping;
  std::map<std::string, double> similarity;

  nlohmann::json to_json() const;
};

// |a ∩ b| / |a ∪ b|; 0 when both sets are empty.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

// Maps every predicted intermediate (including the final conclusion) to a
// gold node by maximum Jaccard similarity of leaf-descendant sets. The final
// predicted conclusion is force-mapped to the gold root; all others compete
// over gold non-root internals, with ties broken by earliest gold step index
// and zero similarity mapping to blank.
AlignmentMap align(const EntailmentTree& pred, const EntailmentTree& gold);

}  // namespace entailrl
