// Acceptance gate: one PASS/FAIL line per criterion; exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "edbench/benchmark.h"
#include "edbench/config.h"
#include "edbench/errors.h"
#include "edbench/format.h"
#include "edbench/report.h"
#include "solver_oracle.h"
#include "test_support.h"

namespace edbench {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] %d. %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string num(double v, int decimals = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", decimals, v);
  return buf;
}

const PowerSystem& sys() { return testing::bundled(); }

void criterion_cost_regression() {
  bool ok = true;
  double worst_err = 0.0, worst_us = 0.0;
  for (std::size_t k = 0; k < testing::kTableDemands.size(); ++k) {
    const Dispatch d{testing::kTableDispatch[k], testing::kTableDemands[k]};
    constexpr int kReps = 1000;
    double cost = 0.0;
    const auto t0 = Clock::now();
    for (int r = 0; r < kReps; ++r) cost = total_cost(d, sys());
    const double us = seconds_since(t0) / kReps * 1e6;
    const double err = std::abs(cost - testing::kTableCosts[k]);
    worst_err = std::max(worst_err, err);
    worst_us = std::max(worst_us, us);
    ok = ok && err <= 0.02 && us < 1000.0;
  }
  report(1, "cost-function regression", ok,
         "max |cost - printed| = " + num(worst_err) + " (tol 0.02), max " + num(worst_us) +
             " us per eval (limit 1 ms)");
}

void criterion_oracle_parity() {
  bool ok = true;
  double worst_rel = 0.0, worst_ms = 0.0;
  for (std::size_t k = 0; k < testing::kTableDemands.size(); ++k) {
    const auto t0 = Clock::now();
    const auto sol = solve_ed(sys(), testing::kTableDemands[k]);
    const double ms = seconds_since(t0) * 1e3;
    const double rel = std::abs(sol.cost - testing::kTableCosts[k]) / testing::kTableCosts[k];
    worst_rel = std::max(worst_rel, rel);
    worst_ms = std::max(worst_ms, ms);
    ok = ok && rel <= 5e-4 && ms < 10.0;
  }
  report(2, "oracle parity on example demands", ok,
         "max rel diff = " + num(worst_rel * 100) + "% (tol 0.05%), max " + num(worst_ms) +
             " ms per solve (limit 10 ms)");
}

void criterion_boundaries() {
  bool ok = solve_ed(sys(), 652).dispatch.pg == sys().p_min_vector() &&
            solve_ed(sys(), 6515).dispatch.pg == sys().p_max_vector();
  for (double pd : {651.0, 6516.0}) {
    try {
      solve_ed(sys(), pd);
      ok = false;
    } catch (const InfeasibleError&) {
    }
  }
  report(3, "boundary behavior", ok,
         "652 -> p_min, 6515 -> p_max, 651 and 6516 -> InfeasibleError");
}

void criterion_kkt_suite() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  bool kkt = true, cost_mono = true, lambda_mono = true, unbeaten = true;
  double prev_cost = -1.0, prev_lambda = -1e300, worst_gap = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double pd = sys().pd_min() + (sys().pd_max() - sys().pd_min()) * k / 49.0;
    const auto sol = solve_ed(sys(), pd);
    const auto cert = check_kkt(sys(), sol);
    kkt = kkt && cert.passes(1e-6, 1e-6);
    worst_gap = std::max({worst_gap, cert.interior_gap, cert.upper_gap, cert.lower_gap});
    cost_mono = cost_mono && sol.cost >= prev_cost;
    lambda_mono = lambda_mono && sol.lambda >= prev_lambda;
    prev_cost = sol.cost;
    prev_lambda = sol.lambda;
    for (int r = 0; r < 1000; ++r) {
      const auto x = testing::random_feasible(sys(), pd, rng);
      unbeaten = unbeaten && testing::oracle_cost(sys(), x) >= sol.cost - 1e-9 * sol.cost;
    }
  }
  const double s = seconds_since(t0);
  report(4, "KKT/property suite", kkt && cost_mono && lambda_mono && unbeaten && s < 5.0,
         std::string("50 demands: KKT ") + (kkt ? "ok" : "violated") + " (max gap " +
             num(worst_gap) + "), cost " + (cost_mono ? "nondecreasing" : "DECREASES") +
             ", lambda " + (lambda_mono ? "nondecreasing" : "DECREASES") + ", 50000 random " +
             (unbeaten ? "never beat the solver" : "BEAT the solver") + ", " + num(s, 3) +
             " s (limit 5 s)");
}

void criterion_ga_quality() {
  const auto fs = build_few_shot_set(sys(), default_few_shot_pds());
  std::vector<Dispatch> parents;
  for (const auto& ex : fs.examples()) parents.push_back(ex.dispatch);
  GaConfig cfg;
  cfg.seed = 42;
  cfg.repair = true;
  cfg.generations = 200;
  cfg.population_target = 10;
  bool ok = true;
  double worst = 0.0, worst_pd = 0.0, worst_gen = 0.0, worst_bal = 0.0;
  for (double pd : default_eval_pds()) {
    const auto res = evolve(sys(), pd, parents, cfg);
    const double exact = solve_ed(sys(), pd).cost;
    const double rel = (res.best_cost - exact) / exact;
    const auto v = violations(res.best, sys());
    if (rel > worst) {
      worst = rel;
      worst_pd = pd;
    }
    worst_gen = std::max(worst_gen, v.generation);
    worst_bal = std::max(worst_bal, v.balance);
    ok = ok && rel < 0.01 && v.generation == 0.0 && v.balance <= 1e-9;
  }
  report(5, "GA feasibility and quality", ok,
         "worst error " + num(worst * 100, 3) + "% at " + format_number(worst_pd) +
             " MW (tol 1%), max gen violation " + num(worst_gen) + ", max balance violation " +
             num(worst_bal) + " (tol 1e-9)");
}

void criterion_prompt_fidelity() {
  const auto fs = build_few_shot_set(sys(), default_few_shot_pds());
  bool order = true, phrases = true, no_coeffs = true;
  static const std::regex number(R"([0-9]+(?:\.[0-9]+)?)");
  std::string leak;
  for (Strategy s : {Strategy::kNonEvolutionary, Strategy::kEvolutionary}) {
    for (double pd : default_eval_pds()) {
      const std::string text = render_prompt(sys(), fs, pd, s).text;
      const bool evo = s == Strategy::kEvolutionary;
      const std::vector<std::string> headings = {
          "Description of Problem\n", "In-Context Examples (Population)\n",
          evo ? "\nEvolutionary Algorithm Task Instruction\n"
              : "\nNon-Evolutionary Algorithm Task Instruction\n"};
      std::size_t at = 0;
      for (const auto& h : headings) {
        const auto pos = text.find(h, at);
        order = order && pos != std::string::npos;
        at = pos == std::string::npos ? at : pos + h.size();
      }
      order = order && text.find("PD = " + format_number(pd) + " MW") != std::string::npos;
      phrases = phrases && text.find(evo ? "generate 10 candidate dispatch sets"
                                         : "maintaining proportionality and logical scaling") !=
                               std::string::npos;

      std::set<std::string> tokens;
      for (auto it = std::sregex_iterator(text.begin(), text.end(), number);
           it != std::sregex_iterator(); ++it) {
        tokens.insert(it->str());
      }
      // a and b values must never appear. c values coincide with some printed
      // example outputs (50, 100, 20, ...), so the check for them is that every
      // number in the prompt is accounted for by the examples, the target or the
      // numbered steps.
      for (const auto& u : sys().units()) {
        for (double v : {u.a, u.b}) {
          for (const auto& form : {format_roundtrip(v), format_number(v, 5)}) {
            if (tokens.count(form)) {
              no_coeffs = false;
              leak = form;
            }
          }
        }
      }
      std::set<std::string> allowed = {format_number(pd), "1", "2", "3", "4", "5", "10"};
      for (const auto& ex : fs.examples()) {
        allowed.insert(format_number(ex.pd));
        allowed.insert(format_number(ex.cost));
        for (double p : ex.dispatch.pg) allowed.insert(format_number(p));
      }
      for (const auto& t : tokens) {
        if (!allowed.count(t)) {
          no_coeffs = false;
          leak = t;
        }
      }
    }
  }
  report(6, "prompt fidelity", order && phrases && no_coeffs,
         std::string("20 prompts: sections ") + (order ? "in order" : "OUT OF ORDER") +
             ", instruction phrases " + (phrases ? "present" : "MISSING") +
             ", coefficients " + (no_coeffs ? "absent" : "LEAKED (" + leak + ")"));
}

std::string run_demo_once(const testing::TempDir& dir, const std::string& name,
                          BenchmarkReport* out) {
  const auto cfg = load_bench_config(testing::demo_dir() / "demo_config.json");
  const PowerSystem system = load_system_file(cfg.system_path);
  const ReplayStore store(cfg.replay_path, ReplayStore::Mode::kRead);
  ReplayBackend backend(store);
  BenchmarkOptions opts;
  opts.concurrency = cfg.concurrency;
  opts.error_constants = cfg.error_constants;
  *out = run_benchmark(system, cfg.scenarios, cfg.models, cfg.strategies, backend, opts);
  const auto manifest = make_run_manifest(cfg, *out);
  std::string bytes;
  for (const auto& p : emit_report(*out, dir / name, ReportFormat::kAll, &manifest)) {
    bytes += p.filename().string() + "\n" + testing::read_file(p);
  }
  return bytes;
}

// Every cell after the demand column of every data row reads 0.000000.
bool all_zero_cells(const std::string& table) {
  std::istringstream rows(table);
  std::string row;
  std::getline(rows, row);
  int n = 0;
  while (std::getline(rows, row)) {
    ++n;
    std::istringstream cells(row);
    std::string cell;
    std::getline(cells, cell, ',');
    while (std::getline(cells, cell, ',')) {
      if (cell != "0.000000") return false;
    }
  }
  return n > 0;
}

void criterion_replay_determinism() {
  testing::TempDir dir;
  const auto t0 = Clock::now();
  BenchmarkReport a, b;
  std::string bytes_a, bytes_b, error;
  try {
    bytes_a = run_demo_once(dir, "a", &a);
    bytes_b = run_demo_once(dir, "b", &b);
  } catch (const std::exception& e) {
    error = e.what();
  }
  const double s = seconds_since(t0);
  bool zeros = error.empty() && a.results.size() == 80 && a.scored() == 80;
  for (const auto& r : a.results) {
    zeros = zeros && r.rel_error_pct == 0.0 && r.gen_violation == 0.0 &&
            r.balance_violation <= 1e-9;
  }
  for (Strategy st : {Strategy::kNonEvolutionary, Strategy::kEvolutionary}) {
    zeros = zeros && all_zero_cells(error_table_csv(a, st));
  }
  const bool identical = error.empty() && bytes_a == bytes_b;
  report(7, "end-to-end replay determinism", zeros && identical && s < 10.0,
         error.empty() ? std::to_string(a.scored()) + "/80 cells scored, error tables " +
                             (zeros ? "all zero" : "NOT all zero") + ", outputs " +
                             (identical ? "byte-identical" : "DIFFER") + " across two runs, " +
                             num(s, 3) + " s (limit 10 s)"
                       : "error: " + error);
}

void criterion_metrics_on_injected_faults() {
  const auto exact = solve_ed(sys(), 727);
  auto pg = sys().p_min_vector();
  pg[16] = 135;  // the optimum at 727 MW
  auto text = [](const std::vector<double>& v) {
    std::string s = "PG = [";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_roundtrip(v[i]);
    return s + "]";
  };
  auto short10 = pg;
  short10[16] -= 10;
  const auto imbalance = score_response(sys(), exact, text(short10), Constants::kExclude);
  auto over = pg;
  over[0] = 30;
  over[16] = 155;
  const auto limits = score_response(sys(), exact, text(over), Constants::kExclude);
  // Below p_min the dispatch is cheaper than the optimum; the error is unsigned.
  const double hand =
      std::abs(testing::oracle_cost(sys(), over) - testing::oracle_cost(sys(), pg)) /
      testing::oracle_cost(sys(), pg) * 100.0;
  const auto garbage = score_response(sys(), exact, "I cannot comply.", Constants::kExclude);

  std::vector<ScenarioResult> rows = {imbalance, limits, garbage};
  for (auto& r : rows) r.model = "m";
  const auto s1 = summarize(rows);
  std::swap(rows[0], rows[2]);
  const auto s2 = summarize(rows);
  const bool same = s1.size() == 1 && s2.size() == 1 &&
                    s1[0].mean_balance_violation == s2[0].mean_balance_violation &&
                    s1[0].mean_rel_error_pct == s2[0].mean_rel_error_pct && s1[0].scored == 2;

  const bool ok = imbalance.balance_violation == 10.0 && imbalance.gen_violation == 0.0 &&
                  limits.gen_violation == 20.0 && limits.balance_violation == 0.0 &&
                  std::abs(limits.rel_error_pct - hand) < 1e-9 && !garbage.parse_ok && same;
  report(8, "metrics on handcrafted fixtures (published LLM percentages are not reproduced)", ok,
         "10 MW omission -> balance " + num(imbalance.balance_violation, 17) +
             ", 20 MW under p_min -> gen " + num(limits.gen_violation, 17) + ", rel error " +
             num(limits.rel_error_pct, 6) + "% vs hand " + num(hand, 6) +
             "%, unparseable -> failed, summary order-independent " + (same ? "yes" : "NO"));
}

}  // namespace
}  // namespace edbench

int main() {
  using namespace edbench;
  const auto run = [](auto fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      std::printf("[FAIL] unexpected exception: %s\n", e.what());
      ++failures;
    }
  };
  run(criterion_cost_regression);
  run(criterion_oracle_parity);
  run(criterion_boundaries);
  run(criterion_kkt_suite);
  run(criterion_ga_quality);
  run(criterion_prompt_fidelity);
  run(criterion_replay_determinism);
  run(criterion_metrics_on_injected_faults);
  std::printf("%s: %d failing\n", failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              failures);
  return failures == 0 ? 0 : 1;
}
