#include "tb/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace tb {

namespace {

void reject_unknown(const Json& j, const std::set<std::string>& known,
                    const std::string& where) {
  for (const auto& item : j.items()) {
    if (known.count(item.key()) == 0) {
      throw std::runtime_error("unknown config key " + where + "." + item.key());
    }
  }
}

EndpointConfig endpoint_from_json(const Json& j, const std::string& name) {
  if (!j.is_object()) {
    throw std::runtime_error("endpoint " + name + " must be an object");
  }
  reject_unknown(j,
                 {"base_url", "model_id", "auth_env", "timeout_seconds",
                  "max_in_flight", "retries", "merge_mode", "ttc", "ttc_request"},
                 "endpoints." + name);
  EndpointConfig cfg;
  cfg.base_url = j.at("base_url").get<std::string>();
  cfg.model_id = j.at("model_id").get<std::string>();
  if (j.contains("auth_env")) cfg.auth_env = j.at("auth_env").get<std::string>();
  if (j.contains("timeout_seconds")) {
    cfg.timeout_seconds = j.at("timeout_seconds").get<double>();
  }
  if (j.contains("max_in_flight")) {
    cfg.max_in_flight = j.at("max_in_flight").get<int>();
  }
  if (j.contains("retries")) cfg.retries = j.at("retries").get<int>();
  if (j.contains("merge_mode")) {
    cfg.merge_mode = merge_mode_from_string(j.at("merge_mode").get<std::string>());
  }
  if (j.contains("ttc")) cfg.ttc = j.at("ttc").get<bool>();
  if (j.contains("ttc_request")) cfg.ttc_request = j.at("ttc_request");
  if (cfg.timeout_seconds <= 0) {
    throw std::runtime_error("endpoints." + name + ".timeout_seconds must be > 0");
  }
  if (cfg.max_in_flight < 1) {
    throw std::runtime_error("endpoints." + name + ".max_in_flight must be >= 1");
  }
  if (cfg.retries < 0) {
    throw std::runtime_error("endpoints." + name + ".retries must be >= 0");
  }
  return cfg;
}

NamingScheme naming_from_json(const Json& j) {
  reject_unknown(j,
                 {"nl_prefix", "var_prefix", "binding_prefix", "nl_dict",
                  "var_dict", "binding_dict"},
                 "naming");
  NamingScheme scheme;
  if (j.contains("nl_prefix")) scheme.nl_prefix = j.at("nl_prefix").get<std::string>();
  if (j.contains("var_prefix")) {
    scheme.var_prefix = j.at("var_prefix").get<std::string>();
  }
  if (j.contains("binding_prefix")) {
    scheme.binding_prefix = j.at("binding_prefix").get<std::string>();
  }
  if (j.contains("nl_dict")) {
    scheme.nl_dict = j.at("nl_dict").get<std::vector<std::string>>();
  }
  if (j.contains("var_dict")) {
    scheme.var_dict = j.at("var_dict").get<std::vector<std::string>>();
  }
  if (j.contains("binding_dict")) {
    scheme.binding_dict = j.at("binding_dict").get<std::vector<std::string>>();
  }
  return scheme;
}

}  // namespace

CliConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw std::runtime_error("config must be a JSON object");
  reject_unknown(
      j, {"corpus", "sigdb", "out_dir", "repeats", "endpoints", "naming"}, "config");
  CliConfig cfg;
  if (j.contains("corpus")) cfg.corpus = j.at("corpus").get<std::string>();
  if (j.contains("sigdb")) cfg.sigdb = j.at("sigdb").get<std::string>();
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("repeats")) cfg.repeats = j.at("repeats").get<int>();
  if (cfg.repeats < 1) throw std::runtime_error("config.repeats must be >= 1");
  if (j.contains("endpoints")) {
    for (const auto& item : j.at("endpoints").items()) {
      cfg.endpoints.emplace(item.key(),
                            endpoint_from_json(item.value(), item.key()));
    }
  }
  if (j.contains("naming")) cfg.naming = naming_from_json(j.at("naming"));
  return cfg;
}

CliConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config: " + path.string());
  Json j = Json::parse(in);
  return config_from_json(j);
}

}  // namespace tb
