#include "entailrl/manifest.hpp"

#include <ctime>
#include <fstream>

#include "entailrl/common.hpp"

namespace entailrl {

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

nlohmann::json RunManifest::to_json() const {
  return nlohmann::json{{"command", command},
                        {"config_hash", config_hash},
                        {"seed", seed},
                        {"input_paths", input_paths},
                        {"artifact_version", artifact_version},
                        {"created_at", created_at}};
}

RunManifest RunManifest::create(const std::string& command,
                                const nlohmann::json& config, std::uint64_t seed,
                                std::vector<std::string> inputs) {
  RunManifest manifest;
  manifest.command = command;
  manifest.config_hash = fnv1a_hex(config.dump());
  manifest.seed = seed;
  manifest.input_paths = std::move(inputs);
  manifest.artifact_version = kArtifactVersion;

  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  manifest.created_at = buf;
  return manifest;
}

void RunManifest::write(const std::string& dir) const {
  std::string path = dir + "/manifest.json";
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << to_json().dump(2) << "\n";
}

}  // namespace entailrl
