#include "entailrl/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "entailrl/text.hpp"

namespace entailrl {

nlohmann::json MetricReport::to_json() const {
  return nlohmann::json{{"leaves_f1", leaves_f1},
                        {"leaves_allcorrect", leaves_allcorrect},
                        {"steps_f1", steps_f1},
                        {"steps_allcorrect", steps_allcorrect},
                        {"intermediates_f1", intermediates_f1},
                        {"intermediates_allcorrect", intermediates_allcorrect},
                        {"overall_allcorrect", overall_allcorrect}};
}

SimilarityFn parse_similarity_fn(const std::string& name) {
  if (name == "lexical_f1") return SimilarityFn::LexicalF1;
  if (name == "external") return SimilarityFn::External;
  throw Error(ErrorCode::UnknownSimilarityFunction, name);
}

double SimilarityConfig::score(const std::string& a, const std::string& b) const {
  switch (function) {
    case SimilarityFn::LexicalF1:
      return lexical_similarity(a, b);
    case SimilarityFn::External:
      if (!external)
        throw Error(ErrorCode::UnknownSimilarityFunction,
                    "external similarity not provided");
      return external(a, b);
  }
  throw Error(ErrorCode::UnknownSimilarityFunction, "bad similarity enum");
}

namespace {

double micro_f1(double matched_pred, double matched_gold, std::size_t pred_total,
                std::size_t gold_total) {
  if (pred_total == 0 || gold_total == 0)
    return pred_total == gold_total ? 1.0 : 0.0;
  double precision = matched_pred / static_cast<double>(pred_total);
  double recall = matched_gold / static_cast<double>(gold_total);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

int allcorrect(double f1) { return f1 >= 1.0 ? 1 : 0; }

}  // namespace

std::pair<double, int> score_leaves(const EntailmentTree& pred,
                                    const EntailmentTree& gold) {
  std::set<std::string> pl = pred.leaf_ids();
  std::set<std::string> gl = gold.leaf_ids();
  std::size_t inter = 0;
  for (const auto& id : pl) inter += gl.count(id);
  double f1 = micro_f1(static_cast<double>(inter), static_cast<double>(inter),
                       pl.size(), gl.size());
  return {f1, allcorrect(f1)};
}

std::pair<double, int> score_steps(const EntailmentTree& pred,
                                   const EntailmentTree& gold,
                                   const AlignmentMap& amap) {
  std::map<std::string, const ProofStep*> gold_by_conclusion;
  for (const auto& step : gold.steps) gold_by_conclusion[step.conclusion_id] = &step;

  auto substituted = [&](const ProofStep& step) {
    std::set<std::string> ids;
    for (const auto& premise : step.premises) {
      auto kind = pred.defined(premise) ? pred.node(premise).kind : NodeKind::Intermediate;
      if (kind == NodeKind::Fact) {
        ids.insert(premise);
      } else {
        auto it = amap.mapping.find(premise);
        if (it != amap.mapping.end() && it->second) {
          ids.insert(*it->second);
        } else {
          ids.insert("\x01blank:" + premise);  // never matches a gold id
        }
      }
    }
    return ids;
  };

  std::size_t matched_pred = 0;
  std::set<std::string> matched_gold;
  for (const auto& step : pred.steps) {
    auto target = amap.mapping.find(step.conclusion_id);
    if (target == amap.mapping.end() || !target->second) continue;
    auto gstep = gold_by_conclusion.find(*target->second);
    if (gstep == gold_by_conclusion.end()) continue;
    std::set<std::string> gold_premises(gstep->second->premises.begin(),
                                        gstep->second->premises.end());
    if (substituted(step) == gold_premises) {
      ++matched_pred;
      matched_gold.insert(*target->second);
    }
  }
  double f1 = micro_f1(static_cast<double>(matched_pred),
                       static_cast<double>(matched_gold.size()),
                       pred.steps.size(), gold.steps.size());
  return {f1, allcorrect(f1)};
}

std::pair<double, int> score_intermediates(const EntailmentTree& pred,
                                           const EntailmentTree& gold,
                                           const AlignmentMap& amap,
                                           const SimilarityConfig& simcfg) {
  std::size_t correct = 0;
  for (const auto& step : pred.steps) {
    auto target = amap.mapping.find(step.conclusion_id);
    if (target == amap.mapping.end() || !target->second) continue;
    if (!gold.defined(*target->second)) continue;
    const std::string& pred_text = pred.node(step.conclusion_id).text;
    const std::string& gold_text = gold.node(*target->second).text;
    if (simcfg.score(pred_text, gold_text) >= simcfg.threshold) ++correct;
  }
  double f1 = micro_f1(static_cast<double>(correct), static_cast<double>(correct),
                       pred.steps.size(), gold.steps.size());
  return {f1, allcorrect(f1)};
}

MetricReport score_tree(const EntailmentTree& pred, const EntailmentTree& gold,
                        const SimilarityConfig& simcfg) {
  AlignmentMap amap = align(pred, gold);
  MetricReport report;
  std::tie(report.leaves_f1, report.leaves_allcorrect) = score_leaves(pred, gold);
  std::tie(report.steps_f1, report.steps_allcorrect) = score_steps(pred, gold, amap);
  std::tie(report.intermediates_f1, report.intermediates_allcorrect) =
      score_intermediates(pred, gold, amap, simcfg);
  report.overall_allcorrect = report.leaves_allcorrect &&
                              report.steps_allcorrect &&
                              report.intermediates_allcorrect;
  return report;
}

nlohmann::json CorpusReport::to_json() const {
  nlohmann::json out{{"count", count},
                     {"leaves_f1", leaves_f1},
                     {"leaves_allcorrect", leaves_allcorrect},
                     {"steps_f1", steps_f1},
                     {"steps_allcorrect", steps_allcorrect},
                     {"intermediates_f1", intermediates_f1},
                     {"intermediates_allcorrect", intermediates_allcorrect},
                     {"overall_allcorrect", overall_allcorrect}};
  out["per_instance"] = nlohmann::json::array();
  for (const auto& r : per_instance) out["per_instance"].push_back(r.to_json());
  return out;
}

CorpusReport aggregate(std::vector<MetricReport> reports) {
  CorpusReport corpus;
  corpus.count = reports.size();
  if (!reports.empty()) {
    double n = static_cast<double>(reports.size());
    for (const auto& r : reports) {
      corpus.leaves_f1 += r.leaves_f1;
      corpus.leaves_allcorrect += r.leaves_allcorrect;
      corpus.steps_f1 += r.steps_f1;
      corpus.steps_allcorrect += r.steps_allcorrect;
      corpus.intermediates_f1 += r.intermediates_f1;
      corpus.intermediates_allcorrect += r.intermediates_allcorrect;
      corpus.overall_allcorrect += r.overall_allcorrect;
    }
    corpus.leaves_f1 /= n;
    corpus.leaves_allcorrect /= n;
    corpus.steps_f1 /= n;
    corpus.steps_allcorrect /= n;
    corpus.intermediates_f1 /= n;
    corpus.intermediates_allcorrect /= n;
    corpus.overall_allcorrect /= n;
  }
  corpus.per_instance = std::move(reports);
  return corpus;
}

std::string corpus_tsv(const CorpusReport& report) {
  auto pct = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v * 100.0);
    return std::string(buf);
  };
  std::ostringstream out;
  out << "leaves_f1\tleaves_allcorrect\tsteps_f1\tsteps_allcorrect\t"
         "intermediates_f1\tintermediates_allcorrect\toverall_allcorrect\n";
  out << pct(report.leaves_f1) << '\t' << pct(report.leaves_allcorrect) << '\t'
      << pct(report.steps_f1) << '\t' << pct(report.steps_allcorrect) << '\t'
      << pct(report.intermediates_f1) << '\t'
      << pct(report.intermediates_allcorrect) << '\t'
      << pct(report.overall_allcorrect) << '\n';
  return out.str();
}

}  // namespace entailrl
