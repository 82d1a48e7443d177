#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "tb/harness.hpp"
#include "tb/rewrite.hpp"
#include "tb/task.hpp"

namespace tb {

// Tool configuration. Endpoints carry only the NAME of the environment
// variable holding their token; token values never appear in config files.
struct CliConfig {
  std::string corpus;
  std::string sigdb;
  std::string out_dir = "out";
  int repeats = 3;
  std::map<std::string, EndpointConfig> endpoints;
  NamingScheme naming;
};

// Rejects unknown keys at every level, naming the offending key.
CliConfig config_from_json(const Json& j);
CliConfig load_config(const std::filesystem::path& path);

}  // namespace tb
