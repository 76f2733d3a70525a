#include "entailrl/alignment.hpp"

namespace entailrl {

nlohmann::json AlignmentMap::to_json() const {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [pred, gold] : mapping) {
    nlohmann::json entry;
    entry["gold"] = gold ? nlohmann::json(*gold) : nlohmann::json(nullptr);
    entry["similarity"] = similarity.at(pred);
    out[pred] = entry;
  }
  return out;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

AlignmentMap align(const EntailmentTree& pred, const EntailmentTree& gold) {
  // gold internal candidates in step order, root excluded
  std::vector<std::pair<std::string, std::set<std::string>>> candidates;
  for (const auto& step : gold.steps) {
    if (step.conclusion_id == gold.root_id) continue;
    candidates.emplace_back(step.conclusion_id,
                            leaf_descendants(gold, step.conclusion_id));
  }

  const std::string final_id =
      pred.steps.empty() ? std::string() : pred.steps.back().conclusion_id;

  AlignmentMap amap;
  for (const auto& step : pred.steps) {
    const std::string& pid = step.conclusion_id;
    if (pid == final_id) {
      amap.mapping[pid] = gold.root_id;
      amap.similarity[pid] = jaccard(leaf_descendants(pred, pid),
                                     leaf_descendants(gold, gold.root_id));
      continue;
    }
    std::set<std::string> leaves = leaf_descendants(pred, pid);
    double best = 0.0;
    std::optional<std::string> target;
    for (const auto& [gid, gleaves] : candidates) {
      double sim = jaccard(leaves, gleaves);
      if (sim > best) {  // strict: earliest gold step wins ties
        best = sim;
        target = gid;
      }
    }
    amap.mapping[pid] = best > 0.0 ? target : std::nullopt;
    amap.similarity[pid] = best;
  }
  return amap;
}

}  // namespace entailrl
