#include <doctest.h>

#include <random>

#include "entailrl/tree.hpp"
#include "support/oracles.hpp"

using namespace entailrl;

namespace {

const std::map<std::string, std::string> kBank = {
    {"sent1", "A"}, {"sent2", "B"}, {"sent3", "C"}, {"hypothesis", "A B C"}};

}  // namespace

TEST_CASE("parse_proof builds a two-step tree") {
  EntailmentTree tree =
      parse_proof("sent1 & sent2 -> int1: A and B; int1 & sent3 -> hypothesis", kBank);
  CHECK(tree.steps.size() == 2);
  CHECK(tree.root_id == kHypothesisId);
  CHECK(tree.node("int1").text == "A and B");
  CHECK(tree.node("hypothesis").text == "A B C");
  CHECK(tree.leaf_ids() == std::set<std::string>{"sent1", "sent2", "sent3"});
}

TEST_CASE("parse_proof error cases") {
  std::map<std::string, std::string> bank = {{"sent1", "A"}};

  SUBCASE("undefined premise") {
    try {
      parse_proof("sent1 & sent9 -> hypothesis", bank);
      FAIL("expected UndefinedPremise");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UndefinedPremise);
      CHECK(std::string(e.what()).find("sent9") != std::string::npos);
    }
  }
  SUBCASE("duplicate conclusion") {
    try {
      parse_proof(
          "sent1 & sent2 -> int1: x; sent3 & sent4 -> int1: y; int1 & int1 -> hypothesis",
          oracles::numbered_facts(4));
      FAIL("expected DuplicateConclusion");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DuplicateConclusion);
    }
  }
  SUBCASE("malformed step") {
    try {
      parse_proof("sent1 sent2 hypothesis", bank);
      FAIL("expected GrammarError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::GrammarError);
    }
  }
  SUBCASE("single premise") {
    try {
      parse_proof("sent1 -> hypothesis", bank);
      FAIL("expected GrammarError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::GrammarError);
    }
  }
  SUBCASE("reused premise") {
    try {
      parse_proof("sent1 & sent2 -> int1: x; sent1 & int1 -> hypothesis",
                  oracles::numbered_facts(2));
      FAIL("expected ReusedPremise");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ReusedPremise);
    }
  }
  SUBCASE("forest detection") {
    // int1 is never consumed and is not the root
    try {
      parse_proof("sent1 & sent2 -> int1: x; sent3 & sent4 -> hypothesis",
                  oracles::numbered_facts(4));
      FAIL("expected DisconnectedStep");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DisconnectedStep);
    }
  }
  SUBCASE("no hypothesis step") {
    try {
      parse_proof("sent1 & sent2 -> int1: x", oracles::numbered_facts(2));
      FAIL("expected DisconnectedStep");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DisconnectedStep);
    }
  }
}

TEST_CASE("serialize_proof canonical form") {
  EntailmentTree one = parse_proof("sent2 & sent1 -> hypothesis",
                                   oracles::numbered_facts(2));
  CHECK(serialize_proof(one) == "sent1 & sent2 -> hypothesis");

  EntailmentTree two =
      parse_proof("sent1 & sent2 -> int1: A and B; int1 & sent3 -> hypothesis", kBank);
  CHECK(serialize_proof(two) ==
        "sent1 & sent2 -> int1: A and B; sent3 & int1 -> hypothesis");

  SUBCASE("facts sort numerically, not lexicographically") {
    EntailmentTree wide = parse_proof("sent10 & sent2 -> hypothesis",
                                      {{"sent2", "b"}, {"sent10", "j"}});
    CHECK(serialize_proof(wide) == "sent2 & sent10 -> hypothesis");
  }
}

TEST_CASE("round-trip on fixture proofs is a fixed point") {
  std::vector<std::pair<std::string, std::map<std::string, std::string>>> fixtures = {
      {"sent1 & sent2 -> hypothesis", oracles::numbered_facts(2)},
      {"sent1 & sent2 -> int1: A and B; int1 & sent3 -> hypothesis", kBank},
      {"sent3 & sent1 & sent2 -> int1: abc; int1 & sent4 -> hypothesis",
       oracles::numbered_facts(4)},
  };
  for (const auto& [proof, bank] : fixtures) {
    std::string canonical = serialize_proof(parse_proof(proof, bank));
    CHECK(serialize_proof(parse_proof(canonical, bank)) == canonical);
  }
}

TEST_CASE("parse-serialize identity on random binary trees") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    auto facts = oracles::numbered_facts(2 + static_cast<int>(rng() % 6));
    EntailmentTree tree = oracles::random_binary_tree(facts, rng);
    EntailmentTree reparsed = parse_proof(serialize_proof(tree), facts);
    REQUIRE(reparsed.steps.size() == tree.steps.size());
    for (std::size_t i = 0; i < tree.steps.size(); ++i) {
      std::set<std::string> a(tree.steps[i].premises.begin(),
                              tree.steps[i].premises.end());
      std::set<std::string> b(reparsed.steps[i].premises.begin(),
                              reparsed.steps[i].premises.end());
      CHECK(a == b);
      CHECK(tree.steps[i].conclusion_id == reparsed.steps[i].conclusion_id);
    }
  }
}

TEST_CASE("leaf_descendants") {
  EntailmentTree tree =
      parse_proof("sent1 & sent2 -> int1: A and B; int1 & sent3 -> hypothesis", kBank);
  CHECK(leaf_descendants(tree, "int1") == std::set<std::string>{"sent1", "sent2"});
  CHECK(leaf_descendants(tree, "hypothesis") ==
        std::set<std::string>{"sent1", "sent2", "sent3"});
  CHECK(leaf_descendants(tree, "sent2") == std::set<std::string>{"sent2"});
  CHECK_THROWS_AS(leaf_descendants(tree, "sent9"), Error);
}

TEST_CASE("leaf_descendants equals DFS recomputation on random trees") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    auto facts = oracles::numbered_facts(2 + static_cast<int>(rng() % 6));
    EntailmentTree tree = oracles::random_multiway_tree(facts, rng);
    for (const auto& [id, node] : tree.nodes)
      CHECK(leaf_descendants(tree, id) == oracles::dfs_leaves(tree, id));
  }
}

TEST_CASE("binarize left-fold") {
  EntailmentTree tree = parse_proof("sent1 & sent2 & sent3 -> hypothesis",
                                    oracles::numbered_facts(3));
  EntailmentTree bin = binarize(tree);
  REQUIRE(bin.steps.size() == 2);
  CHECK(bin.steps[0].premises == std::vector<std::string>{"sent1", "sent2"});
  CHECK(bin.steps[0].conclusion_id == "aux1");
  CHECK(bin.steps[1].premises == std::vector<std::string>{"aux1", "sent3"});
  CHECK(bin.steps[1].conclusion_id == kHypothesisId);
  CHECK(bin.node("aux1").text == "fact number 1 and fact number 2");
}

TEST_CASE("binarize leaves an already binary tree unchanged") {
  EntailmentTree tree =
      parse_proof("sent1 & sent2 -> int1: A and B; int1 & sent3 -> hypothesis", kBank);
  EntailmentTree bin = binarize(tree);
  CHECK(serialize_proof(bin) == serialize_proof(tree));
  CHECK(bin.nodes.size() == tree.nodes.size());
}

TEST_CASE("binarize preserves leaf sets and is idempotent") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    auto facts = oracles::numbered_facts(3 + static_cast<int>(rng() % 6));
    EntailmentTree tree = oracles::random_multiway_tree(facts, rng);
    EntailmentTree bin = binarize(tree);
    for (const auto& step : bin.steps) REQUIRE(step.premises.size() == 2);
    CHECK(leaf_descendants(bin, bin.root_id) ==
          leaf_descendants(tree, tree.root_id));
    CHECK(bin.steps.size() == bin.leaf_ids().size() - 1);
    CHECK(serialize_proof(binarize(bin)) == serialize_proof(bin));
  }
}

TEST_CASE("leaf count identity") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    auto facts = oracles::numbered_facts(2 + static_cast<int>(rng() % 6));
    EntailmentTree tree = oracles::random_binary_tree(facts, rng);
    std::set<std::string> referenced;
    for (const auto& step : tree.steps)
      for (const auto& p : step.premises)
        if (classify_id(p) == NodeKind::Fact) referenced.insert(p);
    CHECK(leaf_descendants(tree, tree.root_id).size() == referenced.size());
  }
}
