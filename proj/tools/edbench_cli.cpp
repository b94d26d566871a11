// edbench: economic dispatch solver, prompt renderer, GA baseline and LLM
// benchmark runner.
//
// Exit codes: 0 success, 1 domain / IO / gateway failure, 2 usage or config error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "edbench/benchmark.h"
#include "edbench/config.h"
#include "edbench/errors.h"
#include "edbench/format.h"
#include "edbench/ga.h"
#include "edbench/gateway.h"
#include "edbench/power_system.h"
#include "edbench/prompt.h"
#include "edbench/replay_store.h"
#include "edbench/report.h"
#include "edbench/solver.h"

#ifndef EDBENCH_DEFAULT_SYSTEM
#define EDBENCH_DEFAULT_SYSTEM "data/ieee118_gen19.csv"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace edbench {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

json solution_json(const PowerSystem& sys, const EdSolution& sol) {
  std::vector<int> buses;
  for (const auto& u : sys.units()) buses.push_back(u.bus_id);
  return json{{"pd", sol.dispatch.pd},
              {"cost", sol.cost},
              {"lambda", sol.lambda},
              {"include_constants", sol.constants == Constants::kInclude},
              {"bus", buses},
              {"pg", sol.dispatch.pg}};
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw IoError("write failed: " + path.string());
}

struct SolveArgs {
  std::string system = EDBENCH_DEFAULT_SYSTEM;
  double pd = 0.0;
  bool include_constants = false;
};

int cmd_solve(const SolveArgs& a) {
  const PowerSystem sys = load_system_file(a.system);
  const auto sol =
      solve_ed(sys, a.pd, a.include_constants ? Constants::kInclude : Constants::kExclude);
  std::cout << solution_json(sys, sol).dump(2) << "\n";
  return kExitOk;
}

struct PromptArgs {
  std::string system = EDBENCH_DEFAULT_SYSTEM;
  std::string strategy = "non-evolutionary";
  double pd = 0.0;
  std::vector<double> few_shot = default_few_shot_pds();
  std::string out;
  std::string format = "txt";
};

int cmd_prompt(const PromptArgs& a) {
  const Strategy strategy = parse_strategy(a.strategy);
  const PowerSystem sys = load_system_file(a.system);
  const FewShotSet fs = build_few_shot_set(sys, a.few_shot);
  const PromptBundle bundle = render_prompt(sys, fs, a.pd, strategy);
  const std::string text = a.format == "json" ? json(bundle).dump(2) + "\n" : bundle.text;
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_text(a.out, text);
    std::cerr << "wrote " << a.out << " (fingerprint " << bundle.fingerprint << ")\n";
  }
  return kExitOk;
}

struct GaArgs {
  std::string system = EDBENCH_DEFAULT_SYSTEM;
  double pd = 0.0;
  std::vector<double> few_shot = default_few_shot_pds();
  GaConfig cfg;
  bool paper_faithful = false;
  bool no_repair = false;
  std::string crossover;
  std::string parent_source;
  std::string survival;
};

int cmd_ga(GaArgs a) {
  // Explicit operator flags apply on top of the preset.
  GaConfig cfg = a.cfg;
  if (a.paper_faithful) cfg = GaConfig::paper_faithful(a.cfg.seed);
  json overrides = json::object();
  if (!a.crossover.empty()) overrides["crossover"] = a.crossover;
  if (!a.parent_source.empty()) overrides["parent_source"] = a.parent_source;
  if (!a.survival.empty()) overrides["survival"] = a.survival;
  from_json(overrides, cfg);
  if (a.no_repair) cfg.repair = false;
  cfg.validate();

  const PowerSystem sys = load_system_file(a.system);
  const FewShotSet fs = build_few_shot_set(sys, a.few_shot);
  std::vector<Dispatch> parents;
  for (const auto& ex : fs.examples()) parents.push_back(ex.dispatch);

  const GaResult res = evolve(sys, a.pd, parents, cfg);
  const EdSolution exact = solve_ed(sys, a.pd);
  const Violations v = violations(res.best, sys);
  std::cout << json{{"pd", a.pd},
                    {"config", cfg},
                    {"best_cost", res.best_cost},
                    {"exact_cost", exact.cost},
                    {"rel_error_pct", 100.0 * (res.best_cost - exact.cost) / exact.cost},
                    {"gen_violation", v.generation},
                    {"balance_violation", v.balance},
                    {"evaluations", res.evaluations},
                    {"history", res.history},
                    {"pg", res.best.pg}}
                   .dump(2)
            << "\n";
  return kExitOk;
}

void print_summary(const BenchmarkReport& report) {
  std::fprintf(stderr, "%-20s %-17s %6s %6s %6s %12s %12s %12s\n", "model", "strategy", "cells",
               "scored", "failed", "mean_err_%", "gen_viol", "bal_viol");
  for (const auto& s : report.summaries) {
    std::fprintf(stderr, "%-20s %-17s %6zu %6zu %6zu %12.6f %12.6f %12.6f\n", s.model.c_str(),
                 std::string(to_string(s.strategy)).c_str(), s.cells, s.scored, s.failed,
                 s.mean_rel_error_pct, s.mean_gen_violation, s.mean_balance_violation);
  }
}

json summary_json(const BenchmarkReport& report, const std::vector<fs::path>& written) {
  std::vector<std::string> files;
  for (const auto& p : written) files.push_back(p.string());
  return json{{"cells", report.results.size()},
              {"scored", report.scored()},
              {"failed", report.failed()},
              {"files", files}};
}

int cmd_bench(const std::string& config_path) {
  const BenchConfig cfg = load_bench_config(config_path);
  if (cfg.backend == BackendKind::kLive) cfg.check_live_ready();

  const PowerSystem sys = load_system_file(cfg.system_path);
  cfg.scenarios.validate(sys);

  std::unique_ptr<ReplayStore> store;
  std::unique_ptr<CompletionBackend> backend;
  if (cfg.backend == BackendKind::kReplay) {
    store = std::make_unique<ReplayStore>(cfg.replay_path, ReplayStore::Mode::kRead);
    for (const auto& w : store->warnings()) std::cerr << "warning: " << w << "\n";
    backend = std::make_unique<ReplayBackend>(*store);
  } else {
    LiveOptions opts;
    opts.max_in_flight = static_cast<std::ptrdiff_t>(cfg.concurrency);
    if (!cfg.replay_path.empty()) {
      store = std::make_unique<ReplayStore>(cfg.replay_path, ReplayStore::Mode::kAppend);
      opts.record = store.get();
    }
    backend = std::make_unique<LiveBackend>(opts);
  }

  BenchmarkOptions opts;
  opts.error_constants = cfg.error_constants;
  opts.concurrency = cfg.concurrency;
  opts.ga_baseline = cfg.ga_baseline;
  const BenchmarkReport report =
      run_benchmark(sys, cfg.scenarios, cfg.models, cfg.strategies, *backend, opts);

  const json manifest = make_run_manifest(cfg, report);
  auto written = emit_report(report, cfg.output_dir, ReportFormat::kAll, &manifest);
  const fs::path results = cfg.output_dir / "results.json";
  write_text(results, json(report).dump(1) + "\n");
  written.push_back(results);

  print_summary(report);
  for (const auto& r : report.results) {
    if (!r.parse_ok) {
      std::cerr << "failed: pd=" << format_number(r.pd) << " model=" << r.model
                << " strategy=" << to_string(r.strategy) << ": " << r.failure << "\n";
    }
  }
  std::cout << summary_json(report, written).dump(2) << "\n";
  return kExitOk;
}

struct ReportArgs {
  std::string results;
  std::string out;
  std::string format = "all";
};

int cmd_report(const ReportArgs& a) {
  std::ifstream in(a.results, std::ios::binary);
  if (!in) throw IoError("cannot open results " + a.results);
  BenchmarkReport report;
  try {
    report = json::parse(in).get<BenchmarkReport>();
  } catch (const json::exception& e) {
    throw ValidationError("results " + a.results + ": " + e.what());
  }
  const ReportFormat format = a.format == "csv" ? ReportFormat::kCsv
                              : a.format == "md" ? ReportFormat::kMarkdown
                                                 : ReportFormat::kAll;
  const auto written = emit_report(report, a.out, format);
  std::cout << summary_json(report, written).dump(2) << "\n";
  return kExitOk;
}

int run(int argc, char** argv) {
  CLI::App app{"Economic dispatch solver and LLM benchmark harness", "edbench"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Solve the economic dispatch exactly; JSON on stdout");
  solve->add_option("--system", solve_args.system, "Generator data file (CSV or JSON)")
      ->capture_default_str();
  solve->add_option("--pd", solve_args.pd, "Total load demand in MW")->required();
  solve->add_flag("--include-constants", solve_args.include_constants,
                  "Add the constant cost terms to the reported cost");

  PromptArgs prompt_args;
  auto* prompt = app.add_subcommand("prompt", "Render the few-shot prompt for one demand");
  prompt->add_option("--system", prompt_args.system, "Generator data file (CSV or JSON)")
      ->capture_default_str();
  prompt->add_option("--strategy", prompt_args.strategy, "Prompt strategy")
      ->check(CLI::IsMember({"non-evolutionary", "evolutionary"}))
      ->capture_default_str();
  prompt->add_option("--pd", prompt_args.pd, "Target load demand in MW")->required();
  prompt->add_option("--few-shot", prompt_args.few_shot, "Few-shot demands, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  prompt->add_option("--out", prompt_args.out, "Output file (default: stdout)");
  prompt->add_option("--format", prompt_args.format, "Output format")
      ->check(CLI::IsMember({"txt", "json"}))
      ->capture_default_str();

  GaArgs ga_args;
  auto* ga = app.add_subcommand("ga", "Run the GA baseline from the few-shot dispatches");
  ga->add_option("--system", ga_args.system, "Generator data file (CSV or JSON)")
      ->capture_default_str();
  ga->add_option("--pd", ga_args.pd, "Target load demand in MW")->required();
  ga->add_option("--few-shot", ga_args.few_shot, "Parent demands, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  ga->add_option("--generations", ga_args.cfg.generations, "Number of generations")
      ->capture_default_str();
  ga->add_option("--pool", ga_args.cfg.population_target, "Children per generation / pool size")
      ->capture_default_str();
  ga->add_option("--sigma", ga_args.cfg.mutation_sigma,
                 "Mutation std dev as a fraction of each unit's range")
      ->capture_default_str();
  ga->add_option("--rate", ga_args.cfg.mutation_rate, "Per-gene mutation probability")
      ->capture_default_str();
  ga->add_option("--seed", ga_args.cfg.seed, "RNG seed")->capture_default_str();
  ga->add_option("--crossover", ga_args.crossover, "uniform | single-point");
  ga->add_option("--parent-source", ga_args.parent_source, "original | pool");
  ga->add_option("--survival", ga_args.survival, "generational | elitist | truncation");
  ga->add_flag("--no-repair", ga_args.no_repair, "Skip the power-balance repair step");
  ga->add_flag("--paper-faithful", ga_args.paper_faithful,
               "Single pass of 10 children from the original parents, every gene mutated");

  std::string config_path;
  auto* bench = app.add_subcommand("bench", "Run a benchmark from a JSON config");
  bench->add_option("--config", config_path, "Benchmark config file")->required();

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Re-emit report tables from results.json");
  report->add_option("--results", report_args.results, "results.json from a bench run")
      ->required();
  report->add_option("--out", report_args.out, "Output directory")->required();
  report->add_option("--format", report_args.format, "Tables to write")
      ->check(CLI::IsMember({"csv", "md", "all"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*solve) return cmd_solve(solve_args);
    if (*prompt) return cmd_prompt(prompt_args);
    if (*ga) return cmd_ga(ga_args);
    if (*bench) return cmd_bench(config_path);
    if (*report) return cmd_report(report_args);
  } catch (const ConfigError& e) {
    std::cerr << "edbench: usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "edbench: error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace
}  // namespace edbench

int main(int argc, char** argv) { return edbench::run(argc, argv); }
