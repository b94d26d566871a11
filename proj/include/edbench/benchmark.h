#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edbench/ga.h"
#include "edbench/gateway.h"
#include "edbench/power_system.h"
#include "edbench/prompt.h"
#include "edbench/response_parser.h"
#include "edbench/solver.h"

namespace edbench {

// Model name under which the optional GA baseline is reported.
inline constexpr std::string_view kGaBaselineModel = "ga-baseline";

// One (demand, model, strategy) cell. Costs are recomputed from the parsed
// vector; the model's own cost claim is kept in `parsed` but never scored.
struct ScenarioResult {
  double pd = 0.0;
  std::string model;
  Strategy strategy = Strategy::kNonEvolutionary;
  std::string prompt_fingerprint;
  ParsedResponse parsed;
  bool parse_ok = false;
  std::string failure;  // transport / fixture / parse failure text when !parse_ok
  double latency_s = 0.0;
  double llm_cost = 0.0;
  double exact_cost = 0.0;
  double rel_error_pct = 0.0;
  double gen_violation = 0.0;
  double balance_violation = 0.0;
};

// Means over parse_ok rows of one (model, strategy).
struct CellSummary {
  std::string model;
  Strategy strategy = Strategy::kNonEvolutionary;
  std::size_t cells = 0;
  std::size_t scored = 0;
  std::size_t failed = 0;
  double mean_rel_error_pct = 0.0;
  double mean_gen_violation = 0.0;
  double mean_balance_violation = 0.0;
};

struct BenchmarkReport {
  std::vector<double> eval_pds;
  std::vector<std::string> models;
  std::vector<Strategy> strategies;
  std::vector<int> bus_ids;
  Constants error_constants = Constants::kExclude;
  std::vector<FewShotExample> few_shot;
  std::vector<EdSolution> exact;  // parallel to eval_pds
  std::vector<ScenarioResult> results;
  std::vector<CellSummary> summaries;
  std::size_t oracle_solves = 0;

  std::size_t scored() const;
  std::size_t failed() const { return results.size() - scored(); }
};

struct BenchmarkOptions {
  // Constants convention for both sides of the relative error.
  Constants error_constants = Constants::kExclude;
  std::size_t concurrency = 2;
  // When set, adds a "ga-baseline" row per demand (evolutionary strategy),
  // seeded from the few-shot dispatches.
  std::optional<GaConfig> ga_baseline;
};

// Scores one raw response against the exact solution for its demand.
ScenarioResult score_response(const PowerSystem& sys, const EdSolution& exact,
                              std::string_view raw, Constants error_constants);

// Deterministic regardless of input order: rows are grouped and reduced in
// (model, strategy, pd) order, and the summaries come back sorted the same way.
std::vector<CellSummary> summarize(std::span<const ScenarioResult> results);

// Every (pd, model, strategy) cell: render -> complete -> parse -> score.
// Per-cell failures are recorded in the report and never abort the run.
// Exactly one oracle solve per evaluation demand.
//
// Throws only for an invalid ScenarioSpec / model list before any cell runs.
BenchmarkReport run_benchmark(const PowerSystem& sys, const ScenarioSpec& spec,
                              std::span<const ModelTarget> models,
                              std::span<const Strategy> strategies, CompletionBackend& backend,
                              const BenchmarkOptions& options = {});

void to_json(nlohmann::json& j, const BenchmarkReport& r);
void from_json(const nlohmann::json& j, BenchmarkReport& r);

}  // namespace edbench
