#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "aica/result.hpp"
#include "aica/segmentation.hpp"

namespace aica {

struct BackendConfig {
  std::string kind = "fixture";  // "http" or "fixture"
  std::string endpoint;
  std::string model_name;
  std::string api_key_ref;  // "env:NAME" or a literal key; empty -> AICA_API_KEY
  std::string script_path;  // fixture script
  long timeout_ms = 120000;
  int max_in_flight = 4;
};

struct RunConfig {
  int parallelism = 4;
  std::uint64_t seed = 0;
  double prune_threshold = 0.5;
};

struct PathsConfig {
  std::string assets_dir;  // empty -> built-in default
  std::string output_dir = ".";
};

// Strict JSON config: unknown keys are rejected at every level so typos
// cannot silently fall back to defaults.
struct AppConfig {
  int schema_version = 1;
  BackendConfig backend;
  SegmentationParams scaffold;
  RunConfig run;
  PathsConfig paths;

  static Result<AppConfig> from_json(std::string_view text);
  static Result<AppConfig> load(const std::filesystem::path& path);
};

// Env expansion is supported only here: "env:NAME" reads NAME; an empty
// reference falls back to AICA_API_KEY; anything else is the literal key.
std::string resolve_api_key(const BackendConfig& backend);

}  // namespace aica
