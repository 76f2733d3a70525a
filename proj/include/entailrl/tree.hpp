#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "entailrl/common.hpp"

namespace entailrl {

enum class NodeKind { Fact, Intermediate, Hypothesis };

// Node id namespaces: sentN are facts, intN/auxN/pN are intermediates,
// "hypothesis" is the root. auxN ids are introduced by binarize(), pN ids
// by environment rollouts.
std::optional<NodeKind> classify_id(const std::string& id);

// Canonical node ordering: facts first, then intermediates by namespace,
// numeric suffix breaking ties within a namespace (sent2 before sent10).
bool node_id_less(const std::string& a, const std::string& b);

struct Sentence {
  std::string id;
  std::string text;
  NodeKind kind = NodeKind::Fact;
};

struct ProofStep {
  std::vector<std::string> premises;  // length 2 after binarization
  std::string conclusion_id;
  std::string conclusion_text;
};

struct EntailmentTree {
  std::map<std::string, Sentence> nodes;
  std::vector<ProofStep> steps;
  std::string root_id;

  bool defined(const std::string& id) const { return nodes.count(id) > 0; }
  const Sentence& node(const std::string& id) const;

  // Fact ids referenced as premises anywhere in the steps.
  std::set<std::string> leaf_ids() const;
};

// Builds a tree from steps plus fact texts, validating definitions and
// single-consumer use. `require_connected` additionally rejects forests
// (a conclusion that is neither consumed nor the root); rollout-produced
// trees disable it because an early END can legitimately strand nodes.
EntailmentTree make_tree(const std::vector<ProofStep>& steps,
                         const std::map<std::string, std::string>& fact_texts,
                         const std::string& root_text,
                         bool require_connected = true);

// Grammar: step (";" step)*, step := id (" & " id)+ " -> " (id ":" text | "hypothesis").
// The sentence bank supplies fact texts; a "hypothesis" entry, when present,
// supplies the root text.
EntailmentTree parse_proof(const std::string& proof_text,
                           const std::map<std::string, std::string>& sentence_bank);

// Canonical form: steps in original order, premises sorted facts-first with
// numeric suffix order, single spaces around "&" and "->".
std::string serialize_proof(const EntailmentTree& tree);

// Transitive closure of fact descendants; a fact returns {itself}.
std::set<std::string> leaf_descendants(const EntailmentTree& tree,
                                       const std::string& node_id);

// Left-fold binarization of multi-premise steps. Introduced auxN nodes carry
// the rule-based concatenation of their premises; leaves and root unchanged.
EntailmentTree binarize(const EntailmentTree& tree);

inline constexpr const char* kHypothesisId = "hypothesis";

}  // namespace entailrl
