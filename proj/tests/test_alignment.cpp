#include <doctest.h>

#include <random>

#include "entailrl/alignment.hpp"
#include "support/oracles.hpp"

using namespace entailrl;

TEST_CASE("jaccard basics") {
  CHECK(jaccard({"s1", "s2"}, {"s1", "s2"}) == 1.0);
  CHECK(jaccard({"s1", "s3"}, {"s1", "s2"}) == doctest::Approx(1.0 / 3.0));
  CHECK(jaccard({}, {"s1"}) == 0.0);
  CHECK(jaccard({}, {}) == 0.0);
}

namespace {

EntailmentTree four_leaf_gold() {
  return parse_proof(
      "sent1 & sent2 -> int1: a; int1 & sent3 -> int2: b; int2 & sent4 -> hypothesis",
      oracles::numbered_facts(4));
}

EntailmentTree four_leaf_misordered_pred() {
  std::vector<ProofStep> steps = {
      ProofStep{{"sent1", "sent3"}, "p1", "x"},
      ProofStep{{"p1", "sent2"}, "p2", "y"},
      ProofStep{{"p2", "sent4"}, kHypothesisId, "z"},
  };
  return make_tree(steps, oracles::numbered_facts(4), "the hypothesis");
}

}  // namespace

TEST_CASE("structurally identical trees align one-to-one with similarity 1") {
  EntailmentTree gold = four_leaf_gold();
  AlignmentMap amap = align(gold, gold);
  CHECK(amap.mapping.at("int1") == std::optional<std::string>("int1"));
  CHECK(amap.mapping.at("int2") == std::optional<std::string>("int2"));
  CHECK(amap.mapping.at("hypothesis") == std::optional<std::string>("hypothesis"));
  for (const auto& [id, sim] : amap.similarity) CHECK(sim == 1.0);
}

TEST_CASE("misordered four-leaf example") {
  EntailmentTree gold = four_leaf_gold();
  EntailmentTree pred = four_leaf_misordered_pred();
  AlignmentMap amap = align(pred, gold);

  CHECK(amap.mapping.at("p1") == std::optional<std::string>("int2"));
  CHECK(amap.similarity.at("p1") == doctest::Approx(2.0 / 3.0));
  CHECK(amap.mapping.at("p2") == std::optional<std::string>("int2"));
  CHECK(amap.similarity.at("p2") == doctest::Approx(1.0));
  CHECK(amap.mapping.at("hypothesis") == std::optional<std::string>("hypothesis"));
}

TEST_CASE("distractor-only intermediates align to blank") {
  EntailmentTree gold = parse_proof("sent1 & sent2 -> hypothesis",
                                    oracles::numbered_facts(6));
  std::vector<ProofStep> steps = {
      ProofStep{{"sent5", "sent6"}, "p1", "noise"},
      ProofStep{{"p1", "sent1"}, kHypothesisId, "h"},
  };
  EntailmentTree pred = make_tree(steps, oracles::numbered_facts(6), "h", false);
  AlignmentMap amap = align(pred, gold);
  CHECK(amap.mapping.at("p1") == std::nullopt);
  CHECK(amap.similarity.at("p1") == 0.0);
}

TEST_CASE("alignment is invariant to premise order within steps") {
  EntailmentTree gold = four_leaf_gold();
  EntailmentTree pred = four_leaf_misordered_pred();
  EntailmentTree permuted = pred;
  for (auto& step : permuted.steps)
    std::reverse(step.premises.begin(), step.premises.end());
  AlignmentMap a = align(pred, gold);
  AlignmentMap b = align(permuted, gold);
  CHECK(a.mapping == b.mapping);
  CHECK(a.similarity == b.similarity);
}

TEST_CASE("equal leaf sets receive equal gold targets") {
  EntailmentTree gold = four_leaf_gold();
  EntailmentTree pred = four_leaf_misordered_pred();
  // p2 and the gold-side int2 share {sent1,sent2,sent3}; both pred nodes with
  // that leaf set must map identically
  std::vector<ProofStep> steps = {
      ProofStep{{"sent1", "sent2"}, "p1", "x"},
      ProofStep{{"p1", "sent3"}, "p2", "y"},
      ProofStep{{"p2", "sent4"}, kHypothesisId, "z"},
  };
  EntailmentTree other = make_tree(steps, oracles::numbered_facts(4), "z");
  AlignmentMap a = align(pred, gold);
  AlignmentMap b = align(other, gold);
  CHECK(a.mapping.at("p2") == b.mapping.at("p2"));
}

TEST_CASE("align equals brute-force scan on random tree pairs") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + static_cast<int>(rng() % 5);  // up to 6 leaves
    auto facts = oracles::numbered_facts(n);
    EntailmentTree gold = oracles::random_binary_tree(facts, rng);
    EntailmentTree pred = oracles::random_binary_tree(facts, rng);
    AlignmentMap amap = align(pred, gold);
    auto brute = oracles::brute_force_align(pred, gold);
    REQUIRE(amap.mapping.size() == brute.size());
    for (const auto& [pid, gid] : brute) CHECK(amap.mapping.at(pid) == gid);
  }
}

TEST_CASE("alignment map serializes to JSON") {
  EntailmentTree gold = four_leaf_gold();
  AlignmentMap amap = align(four_leaf_misordered_pred(), gold);
  nlohmann::json j = amap.to_json();
  CHECK(j.at("p1").at("gold") == "int2");
  CHECK(j.at("p1").at("similarity").get<double>() == doctest::Approx(2.0 / 3.0));
}
