#pragma once

#include <chrono>
#include <functional>
#include <string>

namespace entailrl {

// Joins two premises with "and", trimming whitespace and dropping the first
// premise's terminal period. Deterministic and token-preserving.
std::string rule_based_deduce(const std::string& a, const std::string& b);

struct GeneratorEndpoint {
  std::string url;  // e.g. http://127.0.0.1:8089/deduce
  std::chrono::milliseconds timeout{2000};
  int retries = 0;
};

// POST {"premises": [a, b]} -> {"conclusion": "..."}.
// Throws ConnectionError on transport failure after retries and
// MalformedResponse on a reply without a non-empty conclusion.
std::string remote_deduce(const GeneratorEndpoint& endpoint,
                          const std::string& a, const std::string& b);

using DeduceFn = std::function<std::string(const std::string&, const std::string&)>;

// Rule-based deducer when endpoint is null; otherwise a remote deducer that
// falls back to the rule on any failure (logged to stderr) so a rollout
// never aborts because the generator is down.
DeduceFn make_deducer(const GeneratorEndpoint* endpoint);

}  // namespace entailrl
