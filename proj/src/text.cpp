#include "entailrl/text.hpp"

#include <cctype>
#include <cmath>

namespace entailrl {

std::string normalize_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_space = true;  // swallow leading whitespace
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!in_space) out.push_back(' ');
      in_space = true;
    } else {
      out.push_back(c);
      in_space = false;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::string current;
  for (char raw : s) {
    unsigned char c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      // punctuation and whitespace both act as separators
      if (!current.empty()) {
        tokens.push_back(current);
        current.clear();
      }
    }
  }
  if (!current.empty()) tokens.push_back(current);
  return tokens;
}

std::set<std::string> token_types(const std::vector<std::string>& tokens) {
  return std::set<std::string>(tokens.begin(), tokens.end());
}

double token_f1(const std::vector<std::string>& a,
                const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0.0;
  std::map<std::string, int> count_a;
  std::map<std::string, int> count_b;
  for (const auto& t : a) ++count_a[t];
  for (const auto& t : b) ++count_b[t];
  int overlap = 0;
  for (const auto& [tok, ca] : count_a) {
    auto it = count_b.find(tok);
    if (it != count_b.end()) overlap += std::min(ca, it->second);
  }
  if (overlap == 0) return 0.0;
  // 2PR/(P+R) with P = overlap/|a|, R = overlap/|b| reduces to this.
  return 2.0 * overlap / static_cast<double>(a.size() + b.size());
}

double type_coverage(const std::set<std::string>& target,
                     const std::set<std::string>& source) {
  if (target.empty()) return 0.0;
  int hit = 0;
  for (const auto& t : target) {
    if (source.count(t)) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(target.size());
}

double lexical_similarity(const std::string& a, const std::string& b) {
  return token_f1(tokenize(a), tokenize(b));
}

IdfTable IdfTable::from_texts(const std::vector<std::string>& texts) {
  IdfTable table;
  table.num_docs_ = static_cast<int>(texts.size());
  for (const auto& text : texts) {
    for (const auto& tok : token_types(tokenize(text))) {
      ++table.doc_freq_[tok];
    }
  }
  return table;
}

double IdfTable::idf(const std::string& token) const {
  auto it = doc_freq_.find(token);
  int df = it == doc_freq_.end() ? 0 : it->second;
  return std::log((num_docs_ + 1.0) / (df + 1.0)) + 1.0;
}

double IdfTable::sum(const std::set<std::string>& tokens) const {
  double total = 0.0;
  for (const auto& t : tokens) total += idf(t);
  return total;
}

}  // namespace entailrl
