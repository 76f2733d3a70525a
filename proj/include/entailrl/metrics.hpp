#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "entailrl/alignment.hpp"
#include "entailrl/tree.hpp"

namespace entailrl {

struct MetricReport {
  double leaves_f1 = 0.0;
  int leaves_allcorrect = 0;
  double steps_f1 = 0.0;
  int steps_allcorrect = 0;
  double intermediates_f1 = 0.0;
  int intermediates_allcorrect = 0;
  int overall_allcorrect = 0;

  nlohmann::json to_json() const;
};

enum class SimilarityFn { LexicalF1, External };

SimilarityFn parse_similarity_fn(const std::string& name);

struct SimilarityConfig {
  SimilarityFn function = SimilarityFn::LexicalF1;
  // lexical_f1 default; external scorers conventionally use 0.28
  double threshold = 0.7;
  std::function<double(const std::string&, const std::string&)> external;

  double score(const std::string& a, const std::string& b) const;
};

inline constexpr double kDefaultLexicalThreshold = 0.7;
inline constexpr double kDefaultExternalThreshold = 0.28;

inline double default_threshold(SimilarityFn fn) {
  return fn == SimilarityFn::External ? kDefaultExternalThreshold
                                      : kDefaultLexicalThreshold;
}

std::pair<double, int> score_leaves(const EntailmentTree& pred,
                                    const EntailmentTree& gold);

// A predicted step matches when, after substituting each intermediate premise
// by its aligned gold id, its premise set equals the premise set of the gold
// step concluding the predicted conclusion's aligned node.
std::pair<double, int> score_steps(const EntailmentTree& pred,
                                   const EntailmentTree& gold,
                                   const AlignmentMap& amap);

std::pair<double, int> score_intermediates(const EntailmentTree& pred,
                                           const EntailmentTree& gold,
                                           const AlignmentMap& amap,
                                           const SimilarityConfig& simcfg);

// align + all four metrics against the (unbinarized) gold tree.
MetricReport score_tree(const EntailmentTree& pred, const EntailmentTree& gold,
                        const SimilarityConfig& simcfg);

// Unweighted means over instances; allcorrect fields become fractions.
struct CorpusReport {
  std::size_t count = 0;
  double leaves_f1 = 0.0;
  double leaves_allcorrect = 0.0;
  double steps_f1 = 0.0;
  double steps_allcorrect = 0.0;
  double intermediates_f1 = 0.0;
  double intermediates_allcorrect = 0.0;
  double overall_allcorrect = 0.0;
  std::vector<MetricReport> per_instance;

  nlohmann::json to_json() const;
};

CorpusReport aggregate(std::vector<MetricReport> reports);

// Table layout: Leaves F1/AllCorrect, Steps F1/AllCorrect,
// Intermediates F1/AllCorrect, Overall AllCorrect, as percentages.
std::string corpus_tsv(const CorpusReport& report);

}  // namespace entailrl
