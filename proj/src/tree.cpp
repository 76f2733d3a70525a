#include "entailrl/tree.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>
#include <tuple>

#include "entailrl/deduction.hpp"
#include "entailrl/text.hpp"

namespace entailrl {

namespace {

bool has_numeric_suffix(const std::string& id, const std::string& prefix,
                        long* suffix) {
  if (id.size() <= prefix.size() || id.compare(0, prefix.size(), prefix) != 0)
    return false;
  long value = 0;
  for (std::size_t i = prefix.size(); i < id.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(id[i]))) return false;
    value = value * 10 + (id[i] - '0');
  }
  if (suffix) *suffix = value;
  return true;
}

// rank, numeric suffix; rank 0 is the fact namespace
std::pair<int, long> order_key(const std::string& id) {
  long n = 0;
  if (has_numeric_suffix(id, "sent", &n)) return {0, n};
  if (has_numeric_suffix(id, "int", &n)) return {1, n};
  if (has_numeric_suffix(id, "aux", &n)) return {2, n};
  if (has_numeric_suffix(id, "p", &n)) return {3, n};
  if (id == kHypothesisId) return {4, 0};
  return {5, 0};
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, const std::string& sep) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = s.find(sep, pos);
    if (next == std::string::npos) {
      parts.push_back(s.substr(pos));
      break;
    }
    parts.push_back(s.substr(pos, next - pos));
    pos = next + sep.size();
  }
  return parts;
}

}  // namespace

std::optional<NodeKind> classify_id(const std::string& id) {
  if (id == kHypothesisId) return NodeKind::Hypothesis;
  if (has_numeric_suffix(id, "sent", nullptr)) return NodeKind::Fact;
  if (has_numeric_suffix(id, "int", nullptr) ||
      has_numeric_suffix(id, "aux", nullptr) ||
      has_numeric_suffix(id, "p", nullptr))
    return NodeKind::Intermediate;
  return std::nullopt;
}

bool node_id_less(const std::string& a, const std::string& b) {
  auto ka = order_key(a);
  auto kb = order_key(b);
  if (ka != kb) return ka < kb;
  return a < b;
}

const Sentence& EntailmentTree::node(const std::string& id) const {
  auto it = nodes.find(id);
  if (it == nodes.end()) throw Error(ErrorCode::UnknownNode, id);
  return it->second;
}

std::set<std::string> EntailmentTree::leaf_ids() const {
  std::set<std::string> leaves;
  for (const auto& step : steps) {
    for (const auto& p : step.premises) {
      auto it = nodes.find(p);
      if (it != nodes.end() && it->second.kind == NodeKind::Fact)
        leaves.insert(p);
    }
  }
  return leaves;
}

EntailmentTree make_tree(const std::vector<ProofStep>& steps,
                         const std::map<std::string, std::string>& fact_texts,
                         const std::string& root_text,
                         bool require_connected) {
  EntailmentTree tree;
  std::set<std::string> consumed;
  std::set<std::string> concluded;

  auto define_fact = [&](const std::string& id) {
    auto it = fact_texts.find(id);
    if (it == fact_texts.end() || classify_id(id) != NodeKind::Fact)
      throw Error(ErrorCode::UndefinedPremise, id);
    tree.nodes[id] = Sentence{id, normalize_whitespace(it->second), NodeKind::Fact};
  };

  for (const auto& step : steps) {
    if (step.premises.size() < 2)
      throw Error(ErrorCode::GrammarError,
                  "step needs at least two premises, conclusion " + step.conclusion_id);
    std::set<std::string> seen;
    for (const auto& premise : step.premises) {
      if (!seen.insert(premise).second)
        throw Error(ErrorCode::GrammarError, "repeated premise " + premise);
      if (premise == kHypothesisId)
        throw Error(ErrorCode::GrammarError, "hypothesis cannot be a premise");
      if (consumed.count(premise))
        throw Error(ErrorCode::ReusedPremise, premise);
      if (!tree.defined(premise)) define_fact(premise);
      consumed.insert(premise);
    }
    const std::string& cid = step.conclusion_id;
    if (tree.defined(cid) || fact_texts.count(cid))
      throw Error(ErrorCode::DuplicateConclusion, cid);
    auto kind = classify_id(cid);
    if (!kind || *kind == NodeKind::Fact)
      throw Error(ErrorCode::GrammarError, "bad conclusion id " + cid);
    if (*kind == NodeKind::Hypothesis) {
      tree.root_id = cid;
      tree.nodes[cid] =
          Sentence{cid, normalize_whitespace(root_text.empty() ? step.conclusion_text
                                                               : root_text),
                   NodeKind::Hypothesis};
    } else {
      tree.nodes[cid] =
          Sentence{cid, normalize_whitespace(step.conclusion_text), NodeKind::Intermediate};
    }
    concluded.insert(cid);
    tree.steps.push_back(step);
  }

  if (require_connected) {
    for (const auto& step : tree.steps) {
      const std::string& cid = step.conclusion_id;
      if (cid != tree.root_id && !consumed.count(cid))
        throw Error(ErrorCode::DisconnectedStep, cid);
    }
    if (!tree.steps.empty() && tree.root_id.empty())
      throw Error(ErrorCode::DisconnectedStep,
                  tree.steps.back().conclusion_id);
  }
  return tree;
}

EntailmentTree parse_proof(const std::string& proof_text,
                           const std::map<std::string, std::string>& sentence_bank) {
  std::vector<ProofStep> steps;
  for (const auto& raw : split(proof_text, ";")) {
    std::string chunk = trim(raw);
    if (chunk.empty()) continue;  // tolerate trailing "; "
    std::size_t arrow = chunk.find("->");
    if (arrow == std::string::npos)
      throw Error(ErrorCode::GrammarError, "missing -> in step: " + chunk);
    std::string lhs = trim(chunk.substr(0, arrow));
    std::string rhs = trim(chunk.substr(arrow + 2));

    ProofStep step;
    for (const auto& part : split(lhs, "&")) {
      std::string id = trim(part);
      if (id.empty())
        throw Error(ErrorCode::GrammarError, "empty premise in step: " + chunk);
      step.premises.push_back(id);
    }
    if (step.premises.size() < 2)
      throw Error(ErrorCode::GrammarError, "single-premise step: " + chunk);

    if (rhs == kHypothesisId) {
      step.conclusion_id = kHypothesisId;
    } else {
      std::size_t colon = rhs.find(':');
      if (colon == std::string::npos)
        throw Error(ErrorCode::GrammarError, "conclusion without text: " + chunk);
      step.conclusion_id = trim(rhs.substr(0, colon));
      step.conclusion_text = trim(rhs.substr(colon + 1));
      if (step.conclusion_id.empty() || step.conclusion_text.empty())
        throw Error(ErrorCode::GrammarError, "bad conclusion in step: " + chunk);
    }
    steps.push_back(std::move(step));
  }
  if (steps.empty())
    throw Error(ErrorCode::GrammarError, "empty proof");

  std::string root_text;
  std::map<std::string, std::string> bank = sentence_bank;
  auto hyp = bank.find(kHypothesisId);
  if (hyp != bank.end()) {
    root_text = hyp->second;
    bank.erase(hyp);
  }
  return make_tree(steps, bank, root_text, /*require_connected=*/true);
}

std::string serialize_proof(const EntailmentTree& tree) {
  std::ostringstream out;
  bool first_step = true;
  for (const auto& step : tree.steps) {
    if (!first_step) out << "; ";
    first_step = false;
    std::vector<std::string> premises = step.premises;
    std::sort(premises.begin(), premises.end(), node_id_less);
    for (std::size_t i = 0; i < premises.size(); ++i) {
      if (i) out << " & ";
      out << premises[i];
    }
    out << " -> ";
    if (step.conclusion_id == tree.root_id && tree.root_id == kHypothesisId) {
      out << kHypothesisId;
    } else {
      out << step.conclusion_id << ": " << step.conclusion_text;
    }
  }
  return out.str();
}

std::set<std::string> leaf_descendants(const EntailmentTree& tree,
                                       const std::string& node_id) {
  if (!tree.defined(node_id)) throw Error(ErrorCode::UnknownNode, node_id);

  std::map<std::string, const ProofStep*> producer;
  for (const auto& step : tree.steps) producer[step.conclusion_id] = &step;

  std::map<std::string, std::set<std::string>> memo;
  std::function<const std::set<std::string>&(const std::string&)> visit =
      [&](const std::string& id) -> const std::set<std::string>& {
    auto found = memo.find(id);
    if (found != memo.end()) return found->second;
    std::set<std::string> leaves;
    if (tree.node(id).kind == NodeKind::Fact) {
      leaves.insert(id);
    } else if (auto it = producer.find(id); it != producer.end()) {
      for (const auto& premise : it->second->premises) {
        if (!tree.defined(premise)) continue;  // tolerated in relaxed trees
        const auto& sub = visit(premise);
        leaves.insert(sub.begin(), sub.end());
      }
    }
    return memo.emplace(id, std::move(leaves)).first->second;
  };
  return visit(node_id);
}

EntailmentTree binarize(const EntailmentTree& tree) {
  long max_aux = 0;
  for (const auto& [id, node] : tree.nodes) {
    long n = 0;
    if (has_numeric_suffix(id, "aux", &n)) max_aux = std::max(max_aux, n);
  }

  EntailmentTree out;
  out.root_id = tree.root_id;
  for (const auto& [id, node] : tree.nodes) out.nodes[id] = node;

  for (const auto& step : tree.steps) {
    if (step.premises.size() == 2) {
      out.steps.push_back(step);
      continue;
    }
    std::string left = step.premises.front();
    for (std::size_t i = 1; i + 1 < step.premises.size(); ++i) {
      std::string aux_id = "aux" + std::to_string(++max_aux);
      std::string text = rule_based_deduce(out.node(left).text,
                                           out.node(step.premises[i]).text);
      out.nodes[aux_id] = Sentence{aux_id, text, NodeKind::Intermediate};
      out.steps.push_back(ProofStep{{left, step.premises[i]}, aux_id, text});
      left = aux_id;
    }
    out.steps.push_back(ProofStep{{left, step.premises.back()},
                                  step.conclusion_id, step.conclusion_text});
  }
  return out;
}

}  // namespace entailrl
