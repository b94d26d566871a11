#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "edbench/benchmark.h"

namespace edbench {

enum class BackendKind { kReplay, kLive };

// Benchmark run configuration (JSON). Relative paths resolve against the
// directory holding the config file.
//
//   {
//     "system": "../data/ieee118_gen19.csv",
//     "few_shot_pds": [700, 2150, 3600, 5050, 6500],   // default linspace(700, 6500, 5)
//     "eval_pds": [727, ...],        // or "random_eval": {"count": 10}
//     "models": [{"name": "...", "endpoint": "...", "credential_env": "...", ...}],
//     "strategies": ["non-evolutionary", "evolutionary"],
//     "backend": "replay" | "live",
//     "replay_path": "replay.jsonl",     // replay source, or live recording target
//     "output_dir": "out",
//     "seed": 42,
//     "concurrency": 2,
//     "error_constants": false,
//     "ga_baseline": {...GaConfig...}    // optional
//   }
struct BenchConfig {
  std::filesystem::path system_path;
  ScenarioSpec scenarios;
  std::vector<ModelTarget> models;
  std::vector<Strategy> strategies;
  BackendKind backend = BackendKind::kReplay;
  std::filesystem::path replay_path;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  std::size_t concurrency = 2;
  Constants error_constants = Constants::kExclude;
  std::optional<GaConfig> ga_baseline;
  nlohmann::json echo;  // the parsed file, for the run manifest

  // For the live backend: every model needs an endpoint and its credential
  // env var set. Throws ConfigError before any network traffic.
  void check_live_ready() const;
};

// Throws IoError (unreadable) or ConfigError (malformed). Random evaluation
// demands need the system, so they are drawn here from `seed`.
BenchConfig load_bench_config(const std::filesystem::path& path);
BenchConfig parse_bench_config(const nlohmann::json& j, const std::filesystem::path& base_dir);

// Config echo, template version, prompt fingerprints and cell counts.
nlohmann::json make_run_manifest(const BenchConfig& cfg, const BenchmarkReport& report);

}  // namespace edbench
