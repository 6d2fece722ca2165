#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "rcsp/controllers.hpp"
#include "rcsp/world.hpp"

namespace rcsp {

using Json = nlohmann::json;

/// Bumped whenever the meaning of a persisted config field changes.
inline constexpr const char* kConfigSchemaVersion = "rcsp-config/1";

struct SuiteConfig {
  std::vector<std::string> environments = {"bottleneck", "warehouse-squeeze"};
  std::vector<ControllerKind> controllers = all_controller_kinds();
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  WorldParams world;
  ControllerParams controller;
  std::string output_dir = "out";
  int workers = 1;
  bool verbose = false;

  /// Throws ConfigError on empty lists, duplicate seeds, unknown
  /// environments, or invalid parameter blocks.
  void validate() const;
};

Json to_json(const WorldParams& p);
WorldParams world_params_from_json(const Json& j);

Json to_json(const EnvironmentConfig& cfg);
EnvironmentConfig environment_from_json(const Json& j);

Json to_json(const Conjecture& c);
Conjecture conjecture_from_json(const Json& j);

Json to_json(const ControllerParams& p);
ControllerParams controller_params_from_json(const Json& j);

/// Full config document; missing keys fall back to the built-in defaults.
Json to_json(const SuiteConfig& cfg);
SuiteConfig suite_config_from_json(const Json& j);
SuiteConfig load_suite_config(const std::filesystem::path& path);

/// 64-bit FNV-1a of a string, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace rcsp
