#include "entailrl/deduction.hpp"

#include <cstdio>

#include <httplib.h>
#include <json.hpp>

#include "entailrl/common.hpp"
#include "entailrl/text.hpp"

namespace entailrl {

std::string rule_based_deduce(const std::string& a, const std::string& b) {
  std::string left = normalize_whitespace(a);
  std::string right = normalize_whitespace(b);
  if (!left.empty() && left.back() == '.') left.pop_back();
  while (!left.empty() && left.back() == ' ') left.pop_back();
  return left + " and " + right;
}

namespace {

struct ParsedUrl {
  std::string host;
  int port = 80;
  std::string path = "/";
};

ParsedUrl parse_url(const std::string& url) {
  ParsedUrl out;
  std::string rest = url;
  const std::string scheme = "http://";
  if (rest.rfind(scheme, 0) == 0) rest = rest.substr(scheme.size());
  std::size_t slash = rest.find('/');
  std::string authority = slash == std::string::npos ? rest : rest.substr(0, slash);
  out.path = slash == std::string::npos ? "/" : rest.substr(slash);
  std::size_t colon = authority.find(':');
  if (colon == std::string::npos) {
    out.host = authority;
  } else {
    out.host = authority.substr(0, colon);
    out.port = std::stoi(authority.substr(colon + 1));
  }
  if (out.host.empty())
    throw Error(ErrorCode::ConnectionError, "bad endpoint url: " + url);
  return out;
}

}  // namespace

std::string remote_deduce(const GeneratorEndpoint& endpoint,
                          const std::string& a, const std::string& b) {
  ParsedUrl url = parse_url(endpoint.url);
  httplib::Client client(url.host, url.port);
  auto seconds = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
  auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
      endpoint.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());

  nlohmann::json body = {{"premises", {a, b}}};
  std::string payload = body.dump();

  httplib::Result result;
  for (int attempt = 0; attempt <= endpoint.retries; ++attempt) {
    result = client.Post(url.path.c_str(), payload, "application/json");
    if (result) break;
  }
  if (!result)
    throw Error(ErrorCode::ConnectionError, endpoint.url);
  if (result->status != 200)
    throw Error(ErrorCode::MalformedResponse,
                "status " + std::to_string(result->status));

  nlohmann::json reply = nlohmann::json::parse(result->body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("conclusion") ||
      !reply["conclusion"].is_string())
    throw Error(ErrorCode::MalformedResponse, "missing conclusion field");
  std::string conclusion = reply["conclusion"].get<std::string>();
  if (normalize_whitespace(conclusion).empty())
    throw Error(ErrorCode::MalformedResponse, "empty conclusion");
  return conclusion;
}

DeduceFn make_deducer(const GeneratorEndpoint* endpoint) {
  if (endpoint == nullptr) return rule_based_deduce;
  GeneratorEndpoint copy = *endpoint;
  return [copy](const std::string& a, const std::string& b) {
    try {
      return remote_deduce(copy, a, b);
    } catch (const Error& e) {
      std::fprintf(stderr, "[deduce] remote generator failed (%s); using rule-based fallback\n",
                   e.what());
      return rule_based_deduce(a, b);
    }
  };
}

}  // namespace entailrl
