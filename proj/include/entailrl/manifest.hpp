#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace entailrl {

std::string fnv1a_hex(const std::string& data);

// One manifest per output directory: command, config hash, seed, inputs,
// artifact version, timestamps.
struct RunManifest {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::string> input_paths;
  std::string artifact_version;
  std::string created_at;  // ISO-8601 UTC

  nlohmann::json to_json() const;
  static RunManifest create(const std::string& command,
                            const nlohmann::json& config, std::uint64_t seed,
                            std::vector<std::string> inputs);
  void write(const std::string& dir) const;
};

}  // namespace entailrl
