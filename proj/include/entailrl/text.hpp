#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace entailrl {

// Collapses runs of whitespace to single spaces and trims the ends.
std::string normalize_whitespace(std::string_view s);

// Lowercases, maps punctuation to spaces, splits on whitespace.
std::vector<std::string> tokenize(std::string_view s);

std::set<std::string> token_types(const std::vector<std::string>& tokens);

// Bag-overlap F1: overlap counts min(count_a, count_b) per token type.
// Returns 0 when either side is empty.
double token_f1(const std::vector<std::string>& a,
                const std::vector<std::string>& b);

// Fraction of `target` types present in `source`; 0 when target is empty.
double type_coverage(const std::set<std::string>& target,
                     const std::set<std::string>& source);

// Unigram-overlap F1 of the tokenized strings.
double lexical_similarity(const std::string& a, const std::string& b);

// Smoothed inverse document frequency over a small document pool:
// idf(t) = ln((N + 1) / (df(t) + 1)) + 1.
class IdfTable {
 public:
  IdfTable() = default;
  static IdfTable from_texts(const std::vector<std::string>& texts);

  double idf(const std::string& token) const;
  double sum(const std::set<std::string>& tokens) const;
  int num_docs() const { return num_docs_; }

 private:
  std::map<std::string, int> doc_freq_;
  int num_docs_ = 0;
};

}  // namespace entailrl
