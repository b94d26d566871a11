#include "edbench/config.h"

#include <cstdlib>
#include <fstream>
#include <set>

#include "edbench/errors.h"

namespace edbench {

namespace {

const std::set<std::string> kKnownKeys = {
    "system",     "few_shot_pds", "eval_pds",    "random_eval", "models",
    "strategies", "backend",      "replay_path", "output_dir",  "seed",
    "concurrency", "error_constants", "ga_baseline"};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

}  // namespace

void BenchConfig::check_live_ready() const {
  for (const auto& m : models) {
    if (m.endpoint.empty()) throw ConfigError("model '" + m.name + "' has no endpoint");
    if (m.credential_env.empty()) continue;
    const char* value = std::getenv(m.credential_env.c_str());
    if (value == nullptr || *value == '\0') {
      throw ConfigError("model '" + m.name + "': credential env var " + m.credential_env +
                        " is not set");
    }
  }
}

BenchConfig parse_bench_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kKnownKeys.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }

  BenchConfig cfg;
  cfg.echo = j;
  try {
    cfg.system_path = resolve(base_dir, j.at("system").get<std::string>());
    cfg.scenarios.few_shot_pds =
        j.contains("few_shot_pds") ? j.at("few_shot_pds").get<std::vector<double>>()
                                   : default_few_shot_pds();
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.concurrency = j.value("concurrency", std::size_t{2});
    cfg.error_constants =
        j.value("error_constants", false) ? Constants::kInclude : Constants::kExclude;

    for (const auto& m : j.at("models")) cfg.models.push_back(m.get<ModelTarget>());
    if (j.contains("strategies")) {
      for (const auto& s : j.at("strategies")) {
        cfg.strategies.push_back(parse_strategy(s.get<std::string>()));
      }
    } else {
      cfg.strategies = {Strategy::kNonEvolutionary, Strategy::kEvolutionary};
    }

    const std::string backend = j.value("backend", std::string("replay"));
    if (backend == "replay") {
      cfg.backend = BackendKind::kReplay;
    } else if (backend == "live") {
      cfg.backend = BackendKind::kLive;
    } else {
      throw ConfigError("backend must be 'replay' or 'live', got '" + backend + "'");
    }
    if (j.contains("replay_path")) {
      cfg.replay_path = resolve(base_dir, j.at("replay_path").get<std::string>());
    } else if (cfg.backend == BackendKind::kReplay) {
      throw ConfigError("backend 'replay' needs replay_path");
    }
    cfg.output_dir = resolve(base_dir, j.value("output_dir", std::string("out")));
    if (j.contains("ga_baseline")) cfg.ga_baseline = j.at("ga_baseline").get<GaConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  if (j.contains("eval_pds") && j.contains("random_eval")) {
    throw ConfigError("give eval_pds or random_eval, not both");
  }
  if (j.contains("random_eval")) {
    const auto count = j.at("random_eval").value("count", std::size_t{10});
    const PowerSystem sys = load_system_file(cfg.system_path);
    cfg.scenarios.eval_pds =
        random_eval_pds(sys, count, cfg.seed, cfg.scenarios.few_shot_pds);
  } else if (j.contains("eval_pds")) {
    cfg.scenarios.eval_pds = j.at("eval_pds").get<std::vector<double>>();
  } else {
    cfg.scenarios.eval_pds = default_eval_pds();
  }
  if (cfg.models.empty() && !cfg.ga_baseline) throw ConfigError("config lists no models");
  std::set<std::string> names;
  for (const auto& m : cfg.models) {
    if (!names.insert(m.name).second) throw ConfigError("duplicate model name '" + m.name + "'");
  }
  return cfg;
}

BenchConfig load_bench_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_bench_config(j, path.parent_path());
}

nlohmann::json make_run_manifest(const BenchConfig& cfg, const BenchmarkReport& report) {
  nlohmann::json prompts = nlohmann::json::array();
  std::set<std::string> seen;
  for (const auto& r : report.results) {
    if (r.prompt_fingerprint.empty() || !seen.insert(r.prompt_fingerprint).second) continue;
    prompts.push_back({{"pd", r.pd},
                       {"strategy", to_string(r.strategy)},
                       {"fingerprint", r.prompt_fingerprint}});
  }
  nlohmann::json few_shot = nlohmann::json::array();
  for (const auto& ex : report.few_shot) few_shot.push_back({{"pd", ex.pd}, {"cost", ex.cost}});

  return nlohmann::json{
      {"tool", "edbench"},
      {"prompt_template", std::string(kPromptTemplateVersion)},
      {"config", cfg.echo},
      {"few_shot", few_shot},
      {"prompts", prompts},
      {"cells", report.results.size()},
      {"scored", report.scored()},
      {"failed", report.failed()},
      {"oracle_solves", report.oracle_solves},
  };
}

}  // namespace edbench
