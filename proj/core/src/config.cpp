#include "aica/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace aica {

namespace {

Status check_keys(const nlohmann::json& obj, const char* where,
                  std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) {
      return make_error(Errc::InvalidConfig,
                        std::string("unknown key \"") + key + "\" in " + where);
    }
  }
  return ok_status();
}

}  // namespace

Result<AppConfig> AppConfig::from_json(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return make_error(Errc::InvalidConfig, "config is not a JSON object");
  }
  auto top = check_keys(j, "config", {"schema_version", "backend", "scaffold", "run", "paths"});
  if (!top.ok()) return top.error();

  AppConfig config;
  try {
    config.schema_version = j.value("schema_version", 1);
    if (config.schema_version != 1) {
      return make_error(Errc::InvalidConfig, "unsupported schema_version");
    }
    if (j.contains("backend")) {
      const auto& b = j["backend"];
      auto keys = check_keys(b, "backend",
                             {"kind", "endpoint", "model_name", "api_key_ref", "script_path",
                              "timeout_ms", "max_in_flight"});
      if (!keys.ok()) return keys.error();
      config.backend.kind = b.value("kind", config.backend.kind);
      if (config.backend.kind != "http" && config.backend.kind != "fixture") {
        return make_error(Errc::InvalidConfig,
                          "backend.kind must be \"http\" or \"fixture\"");
      }
      config.backend.endpoint = b.value("endpoint", config.backend.endpoint);
      config.backend.model_name = b.value("model_name", config.backend.model_name);
      config.backend.api_key_ref = b.value("api_key_ref", config.backend.api_key_ref);
      config.backend.script_path = b.value("script_path", config.backend.script_path);
      config.backend.timeout_ms = b.value("timeout_ms", config.backend.timeout_ms);
      config.backend.max_in_flight = b.value("max_in_flight", config.backend.max_in_flight);
    }
    if (j.contains("scaffold")) {
      const auto& s = j["scaffold"];
      auto keys = check_keys(
          s, "scaffold", {"scale", "sigma", "min_size_ratio", "min_regions", "max_regions"});
      if (!keys.ok()) return keys.error();
      config.scaffold.scale = s.value("scale", config.scaffold.scale);
      config.scaffold.sigma = s.value("sigma", config.scaffold.sigma);
      config.scaffold.min_size_ratio = s.value("min_size_ratio", config.scaffold.min_size_ratio);
      config.scaffold.min_regions = s.value("min_regions", config.scaffold.min_regions);
      config.scaffold.max_regions = s.value("max_regions", config.scaffold.max_regions);
      if (!config.scaffold.valid()) {
        return make_error(Errc::InvalidConfig, "scaffold parameters out of range");
      }
    }
    if (j.contains("run")) {
      const auto& r = j["run"];
      auto keys = check_keys(r, "run", {"parallelism", "seed", "prune_threshold"});
      if (!keys.ok()) return keys.error();
      config.run.parallelism = r.value("parallelism", config.run.parallelism);
      config.run.seed = r.value("seed", config.run.seed);
      config.run.prune_threshold = r.value("prune_threshold", config.run.prune_threshold);
      if (config.run.parallelism < 1) {
        return make_error(Errc::InvalidConfig, "run.parallelism must be >= 1");
      }
    }
    if (j.contains("paths")) {
      const auto& p = j["paths"];
      auto keys = check_keys(p, "paths", {"assets_dir", "output_dir"});
      if (!keys.ok()) return keys.error();
      config.paths.assets_dir = p.value("assets_dir", config.paths.assets_dir);
      config.paths.output_dir = p.value("output_dir", config.paths.output_dir);
    }
  } catch (const std::exception& e) {
    return make_error(Errc::InvalidConfig, std::string("bad config value: ") + e.what());
  }
  return config;
}

Result<AppConfig> AppConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return make_error(Errc::IoError, "cannot open config: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::string resolve_api_key(const BackendConfig& backend) {
  const std::string& ref = backend.api_key_ref;
  if (ref.empty()) {
    const char* env = std::getenv("AICA_API_KEY");
    return env != nullptr ? env : "";
  }
  if (ref.rfind("env:", 0) == 0) {
    const char* env = std::getenv(ref.substr(4).c_str());
    return env != nullptr ? env : "";
  }
  return ref;
}

}  // namespace aica
