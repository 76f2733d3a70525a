#include <doctest.h>

#include <random>

#include "entailrl/metrics.hpp"
#include "support/oracles.hpp"

using namespace entailrl;

namespace {

EntailmentTree four_leaf_gold() {
  auto bank = oracles::numbered_facts(4);
  bank["hypothesis"] = "the hypothesis";
  return parse_proof(
      "sent1 & sent2 -> int1: a; int1 & sent3 -> int2: b; int2 & sent4 -> hypothesis",
      bank);
}

EntailmentTree misordered_pred() {
  std::vector<ProofStep> steps = {
      ProofStep{{"sent1", "sent3"}, "p1", "x"},
      ProofStep{{"p1", "sent2"}, "p2", "y"},
      ProofStep{{"p2", "sent4"}, kHypothesisId, "z"},
  };
  return make_tree(steps, oracles::numbered_facts(4), "the hypothesis");
}

}  // namespace

TEST_CASE("score_leaves") {
  EntailmentTree gold = parse_proof("sent1 & sent2 -> hypothesis",
                                    oracles::numbered_facts(3));
  std::vector<ProofStep> steps = {
      ProofStep{{"sent1", "sent2"}, "p1", "x"},
      ProofStep{{"p1", "sent3"}, kHypothesisId, "h"},
  };
  EntailmentTree pred = make_tree(steps, oracles::numbered_facts(3), "h");

  auto [f1, allcorrect] = score_leaves(pred, gold);
  CHECK(f1 == doctest::Approx(0.8));  // precision 2/3, recall 1
  CHECK(allcorrect == 0);

  auto [gf1, gac] = score_leaves(gold, gold);
  CHECK(gf1 == 1.0);
  CHECK(gac == 1);
}

TEST_CASE("score_steps on the misordered example") {
  EntailmentTree gold = four_leaf_gold();
  EntailmentTree pred = misordered_pred();
  AlignmentMap amap = align(pred, gold);
  auto [f1, allcorrect] = score_steps(pred, gold, amap);
  CHECK(f1 == doctest::Approx(1.0 / 3.0));
  CHECK(allcorrect == 0);

  auto [gf1, gac] = score_steps(gold, gold, align(gold, gold));
  CHECK(gf1 == 1.0);
  CHECK(gac == 1);
}

TEST_CASE("binary pred never matches a multi-premise gold step") {
  EntailmentTree gold = parse_proof("sent1 & sent2 & sent3 -> hypothesis",
                                    oracles::numbered_facts(3));
  std::vector<ProofStep> steps = {
      ProofStep{{"sent1", "sent2"}, "p1", "x"},
      ProofStep{{"p1", "sent3"}, kHypothesisId, "h"},
  };
  EntailmentTree pred = make_tree(steps, oracles::numbered_facts(3), "h");
  auto [f1, allcorrect] = score_steps(pred, gold, align(pred, gold));
  CHECK(f1 == 0.0);
  CHECK(allcorrect == 0);
}

TEST_CASE("score_intermediates") {
  EntailmentTree gold = four_leaf_gold();
  SimilarityConfig sim;  // lexical_f1, threshold 0.7

  SUBCASE("identical texts are correct at any threshold") {
    auto [f1, ac] = score_intermediates(gold, gold, align(gold, gold), sim);
    CHECK(f1 == 1.0);
    CHECK(ac == 1);
  }
  SUBCASE("blank-aligned nodes are incorrect regardless of text") {
    auto bank = oracles::numbered_facts(6);
    bank["hypothesis"] = "the conclusion holds";
    EntailmentTree wide = parse_proof("sent1 & sent2 -> hypothesis", bank);
    std::vector<ProofStep> steps = {
        ProofStep{{"sent5", "sent6"}, "p1", "a"},  // blank-aligned
        ProofStep{{"p1", "sent1"}, kHypothesisId, "the conclusion holds"},
    };
    EntailmentTree pred = make_tree(steps, oracles::numbered_facts(6),
                                    "the conclusion holds", false);
    auto [f1, ac] = score_intermediates(pred, wide, align(pred, wide), sim);
    CHECK(f1 == doctest::Approx(2.0 / 3.0));  // only the final node correct
    CHECK(ac == 0);
  }
  SUBCASE("two of three intermediates correct gives F1 = 2/3") {
    EntailmentTree pred = four_leaf_gold();
    // rewrite one intermediate text to disjoint vocabulary
    for (auto& step : pred.steps)
      if (step.conclusion_id == "int1") step.conclusion_text = "zzz qqq";
    pred.nodes["int1"].text = "zzz qqq";
    auto [f1, ac] = score_intermediates(pred, gold, align(pred, gold), sim);
    CHECK(f1 == doctest::Approx(2.0 / 3.0));
    CHECK(ac == 0);
  }
}

TEST_CASE("similarity config") {
  CHECK(parse_similarity_fn("lexical_f1") == SimilarityFn::LexicalF1);
  CHECK_THROWS_AS(parse_similarity_fn("cosine"), Error);
  SimilarityConfig external;
  external.function = SimilarityFn::External;
  CHECK_THROWS_AS(external.score("a", "b"), Error);
  external.external = [](const std::string&, const std::string&) { return 0.5; };
  CHECK(external.score("a", "b") == 0.5);
}

TEST_CASE("overall conjunction and corpus aggregation") {
  MetricReport all_one{1.0, 1, 1.0, 1, 1.0, 1, 1};
  MetricReport no_steps{1.0, 1, 0.5, 0, 1.0, 1, 0};
  CorpusReport corpus = aggregate({all_one, no_steps, no_steps, all_one});
  CHECK(corpus.overall_allcorrect == 0.5);
  CHECK(corpus.steps_f1 == doctest::Approx(0.75));
  CHECK(corpus.count == 4);

  CorpusReport empty = aggregate({});
  CHECK(empty.count == 0);
  CHECK(empty.leaves_f1 == 0.0);
}

TEST_CASE("gold scored against itself is perfect on random trees") {
  std::mt19937_64 rng(97);
  SimilarityConfig sim;
  for (int trial = 0; trial < 50; ++trial) {
    auto facts = oracles::numbered_facts(2 + static_cast<int>(rng() % 6));
    EntailmentTree gold = oracles::random_multiway_tree(facts, rng);
    MetricReport r = score_tree(gold, gold, sim);
    CHECK(r.leaves_f1 == 1.0);
    CHECK(r.steps_f1 == 1.0);
    CHECK(r.intermediates_f1 == 1.0);
    CHECK(r.overall_allcorrect == 1);
  }
}

TEST_CASE("all scores stay inside [0,1] on random tree pairs") {
  std::mt19937_64 rng(131);
  SimilarityConfig sim;
  for (int trial = 0; trial < 50; ++trial) {
    auto facts = oracles::numbered_facts(2 + static_cast<int>(rng() % 6));
    EntailmentTree gold = oracles::random_multiway_tree(facts, rng);
    EntailmentTree pred = oracles::random_binary_tree(facts, rng);
    MetricReport r = score_tree(pred, gold, sim);
    for (double v : {r.leaves_f1, r.steps_f1, r.intermediates_f1}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    for (int v : {r.leaves_allcorrect, r.steps_allcorrect,
                  r.intermediates_allcorrect, r.overall_allcorrect})
      CHECK((v == 0 || v == 1));
    // scoring twice is identical
    MetricReport again = score_tree(pred, gold, sim);
    CHECK(again.to_json() == r.to_json());
  }
}

TEST_CASE("dropping a predicted step never raises steps recall") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    auto facts = oracles::numbered_facts(3 + static_cast<int>(rng() % 4));
    EntailmentTree gold = oracles::random_binary_tree(facts, rng);
    EntailmentTree pred = oracles::random_binary_tree(facts, rng);
    AlignmentMap amap = align(pred, gold);

    auto recall_with = [&](const EntailmentTree& p) {
      std::map<std::string, const ProofStep*> by_conclusion;
      for (const auto& s : gold.steps) by_conclusion[s.conclusion_id] = &s;
      std::set<std::string> matched;
      for (const auto& s : p.steps) {
        auto target = amap.mapping.find(s.conclusion_id);
        if (target == amap.mapping.end() || !target->second) continue;
        auto g = by_conclusion.find(*target->second);
        if (g == by_conclusion.end()) continue;
        std::set<std::string> subst;
        for (const auto& prem : s.premises) {
          if (classify_id(prem) == NodeKind::Fact) {
            subst.insert(prem);
          } else if (auto it = amap.mapping.find(prem);
                     it != amap.mapping.end() && it->second) {
            subst.insert(*it->second);
          } else {
            subst.insert("~" + prem);
          }
        }
        if (subst == std::set<std::string>(g->second->premises.begin(),
                                           g->second->premises.end()))
          matched.insert(*target->second);
      }
      return matched.size();
    };

    std::size_t full = recall_with(pred);
    for (std::size_t drop = 0; drop < pred.steps.size(); ++drop) {
      EntailmentTree reduced = pred;
      reduced.steps.erase(reduced.steps.begin() + drop);
      CHECK(recall_with(reduced) <= full);
    }
  }
}

TEST_CASE("tsv layout") {
  CorpusReport corpus = aggregate({MetricReport{1.0, 1, 1.0, 1, 1.0, 1, 1}});
  std::string tsv = corpus_tsv(corpus);
  CHECK(tsv.find("100.0\t100.0\t100.0\t100.0\t100.0\t100.0\t100.0") !=
        std::string::npos);
}
