#include "edbench/benchmark.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "edbench/errors.h"

namespace edbench {

namespace {

struct Cell {
  std::size_t pd_index = 0;
  const ModelTarget* model = nullptr;
  Strategy strategy = Strategy::kNonEvolutionary;
};

double relative_error_pct(double value, double reference) {
  if (reference == 0.0) {
    return value == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::abs(value - reference) / std::abs(reference) * 100.0;
}

auto order_key(const ScenarioResult& r) {
  return std::tuple(std::string_view(r.model), static_cast<int>(r.strategy), r.pd);
}

}  // namespace

std::size_t BenchmarkReport::scored() const {
  return static_cast<std::size_t>(
      std::count_if(results.begin(), results.end(), [](const auto& r) { return r.parse_ok; }));
}

ScenarioResult score_response(const PowerSystem& sys, const EdSolution& exact,
                              std::string_view raw, Constants error_constants) {
  ScenarioResult r;
  r.pd = exact.dispatch.pd;
  r.exact_cost = exact.constants == error_constants
                     ? exact.cost
                     : total_cost(exact.dispatch, sys, error_constants);
  r.parsed = parse_response(raw, sys.size());
  r.parse_ok = r.parsed.ok();
  if (!r.parse_ok) {
    r.failure = "parse: no vector of length " + std::to_string(sys.size());
    return r;
  }
  const Dispatch d = *r.parsed.dispatch(r.pd);
  r.llm_cost = total_cost(d, sys, error_constants);
  r.rel_error_pct = relative_error_pct(r.llm_cost, r.exact_cost);
  const Violations v = violations(d, sys);
  r.gen_violation = v.generation;
  r.balance_violation = v.balance;
  return r;
}

std::vector<CellSummary> summarize(std::span<const ScenarioResult> results) {
  std::vector<const ScenarioResult*> sorted;
  sorted.reserve(results.size());
  for (const auto& r : results) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto* x, const auto* y) { return order_key(*x) < order_key(*y); });

  std::vector<CellSummary> out;
  for (const auto* r : sorted) {
    if (out.empty() || out.back().model != r->model || out.back().strategy != r->strategy) {
      out.push_back(CellSummary{r->model, r->strategy});
    }
    auto& s = out.back();
    ++s.cells;
    if (!r->parse_ok) {
      ++s.failed;
      continue;
    }
    ++s.scored;
    s.mean_rel_error_pct += r->rel_error_pct;
    s.mean_gen_violation += r->gen_violation;
    s.mean_balance_violation += r->balance_violation;
  }
  for (auto& s : out) {
    if (s.scored == 0) continue;
    const auto n = static_cast<double>(s.scored);
    s.mean_rel_error_pct /= n;
    s.mean_gen_violation /= n;
    s.mean_balance_violation /= n;
  }
  return out;
}

BenchmarkReport run_benchmark(const PowerSystem& sys, const ScenarioSpec& spec,
                              std::span<const ModelTarget> models,
                              std::span<const Strategy> strategies, CompletionBackend& backend,
                              const BenchmarkOptions& options) {
  spec.validate(sys);
  if (models.empty() && !options.ga_baseline) throw ConfigError("no models to benchmark");
  if (strategies.empty()) throw ConfigError("no strategies to benchmark");
  for (const auto& m : models) {
    m.validate();
    if (m.name == kGaBaselineModel) {
      throw ConfigError("model name '" + std::string(kGaBaselineModel) + "' is reserved");
    }
  }
  if (options.ga_baseline) {
    options.ga_baseline->validate();
    if (std::find(strategies.begin(), strategies.end(), Strategy::kEvolutionary) ==
        strategies.end()) {
      throw ConfigError("the GA baseline is reported under the evolutionary strategy");
    }
  }

  BenchmarkReport report;
  report.eval_pds = spec.eval_pds;
  report.strategies.assign(strategies.begin(), strategies.end());
  report.error_constants = options.error_constants;
  for (const auto& u : sys.units()) report.bus_ids.push_back(u.bus_id);
  for (const auto& m : models) report.models.push_back(m.name);

  const FewShotSet few_shot = build_few_shot_set(sys, spec.few_shot_pds);
  report.few_shot.assign(few_shot.examples().begin(), few_shot.examples().end());

  for (double pd : spec.eval_pds) {
    report.exact.push_back(solve_ed(sys, pd, options.error_constants));
    ++report.oracle_solves;
  }

  // One prompt per (pd, strategy), shared by every model.
  std::vector<PromptBundle> prompts(spec.eval_pds.size() * strategies.size());
  for (std::size_t p = 0; p < spec.eval_pds.size(); ++p) {
    for (std::size_t s = 0; s < strategies.size(); ++s) {
      prompts[p * strategies.size() + s] =
          render_prompt(sys, few_shot, spec.eval_pds[p], strategies[s]);
    }
  }

  std::vector<Cell> cells;
  for (std::size_t p = 0; p < spec.eval_pds.size(); ++p) {
    for (const auto& m : models) {
      for (Strategy s : strategies) cells.push_back({p, &m, s});
    }
  }

  std::vector<ScenarioResult> results(cells.size());
  auto run_cell = [&](std::size_t k) {
    const Cell& cell = cells[k];
    const std::size_t s_index = static_cast<std::size_t>(
        std::find(strategies.begin(), strategies.end(), cell.strategy) - strategies.begin());
    const PromptBundle& bundle = prompts[cell.pd_index * strategies.size() + s_index];
    const EdSolution& exact = report.exact[cell.pd_index];
    ScenarioResult r;
    try {
      const LlmExchange ex = backend.complete(bundle, *cell.model);
      r = score_response(sys, exact, ex.raw_response, options.error_constants);
      r.latency_s = ex.latency_s;
    } catch (const Error& e) {
      r = ScenarioResult{};
      r.pd = exact.dispatch.pd;
      r.exact_cost = exact.cost;
      r.failure = e.what();
    }
    r.model = cell.model->name;
    r.strategy = cell.strategy;
    r.prompt_fingerprint = bundle.fingerprint;
    results[k] = std::move(r);
  };

  const std::size_t workers = std::clamp<std::size_t>(options.concurrency, 1, cells.size() + 1);
  if (workers <= 1) {
    for (std::size_t k = 0; k < cells.size(); ++k) run_cell(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < cells.size(); k = next++) run_cell(k);
      });
    }
  }
  report.results = std::move(results);

  if (options.ga_baseline) {
    report.models.emplace_back(kGaBaselineModel);
    std::vector<Dispatch> parents;
    for (const auto& ex : few_shot.examples()) parents.push_back(ex.dispatch);
    for (std::size_t p = 0; p < spec.eval_pds.size(); ++p) {
      const EdSolution& exact = report.exact[p];
      const GaResult ga = evolve(sys, spec.eval_pds[p], parents, *options.ga_baseline);
      ScenarioResult r;
      r.pd = spec.eval_pds[p];
      r.model = std::string(kGaBaselineModel);
      r.strategy = Strategy::kEvolutionary;
      r.parsed.pg = ga.best.pg;
      r.parsed.claimed_cost = ga.best_cost;
      r.parse_ok = true;
      r.exact_cost = exact.cost;
      r.llm_cost = total_cost(ga.best, sys, options.error_constants);
      r.rel_error_pct = relative_error_pct(r.llm_cost, r.exact_cost);
      const Violations v = violations(ga.best, sys);
      r.gen_violation = v.generation;
      r.balance_violation = v.balance;
      report.results.push_back(std::move(r));
    }
  }

  report.summaries = summarize(report.results);
  return report;
}

namespace {

nlohmann::json result_json(const ScenarioResult& r) {
  nlohmann::json j = {{"pd", r.pd},
                      {"model", r.model},
                      {"strategy", to_string(r.strategy)},
                      {"prompt_fingerprint", r.prompt_fingerprint},
                      {"parse_ok", r.parse_ok},
                      {"failure", r.failure},
                      {"latency_s", r.latency_s},
                      {"llm_cost", r.llm_cost},
                      {"exact_cost", r.exact_cost},
                      {"rel_error_pct", r.rel_error_pct},
                      {"gen_violation", r.gen_violation},
                      {"balance_violation", r.balance_violation},
                      {"diagnostics", r.parsed.diagnostics}};
  j["pg"] = r.parsed.pg ? nlohmann::json(*r.parsed.pg) : nlohmann::json(nullptr);
  j["claimed_cost"] =
      r.parsed.claimed_cost ? nlohmann::json(*r.parsed.claimed_cost) : nlohmann::json(nullptr);
  return j;
}

ScenarioResult result_from_json(const nlohmann::json& j) {
  ScenarioResult r;
  r.pd = j.at("pd").get<double>();
  r.model = j.at("model").get<std::string>();
  r.strategy = parse_strategy(j.at("strategy").get<std::string>());
  r.prompt_fingerprint = j.value("prompt_fingerprint", std::string());
  r.parse_ok = j.at("parse_ok").get<bool>();
  r.failure = j.value("failure", std::string());
  r.latency_s = j.value("latency_s", 0.0);
  r.llm_cost = j.at("llm_cost").get<double>();
  r.exact_cost = j.at("exact_cost").get<double>();
  r.rel_error_pct = j.at("rel_error_pct").get<double>();
  r.gen_violation = j.at("gen_violation").get<double>();
  r.balance_violation = j.at("balance_violation").get<double>();
  r.parsed.diagnostics = j.value("diagnostics", std::vector<std::string>{});
  if (!j.at("pg").is_null()) r.parsed.pg = j.at("pg").get<std::vector<double>>();
  if (j.contains("claimed_cost") && !j.at("claimed_cost").is_null()) {
    r.parsed.claimed_cost = j.at("claimed_cost").get<double>();
  }
  return r;
}

}  // namespace

void to_json(nlohmann::json& j, const BenchmarkReport& r) {
  j = nlohmann::json::object();
  j["eval_pds"] = r.eval_pds;
  j["models"] = r.models;
  auto& strategies = j["strategies"] = nlohmann::json::array();
  for (Strategy s : r.strategies) strategies.push_back(to_string(s));
  j["bus_ids"] = r.bus_ids;
  j["error_constants"] = r.error_constants == Constants::kInclude;
  auto& few = j["few_shot"] = nlohmann::json::array();
  for (const auto& ex : r.few_shot) {
    few.push_back({{"pd", ex.pd}, {"cost", ex.cost}, {"pg", ex.dispatch.pg}});
  }
  auto& exact = j["exact"] = nlohmann::json::array();
  for (const auto& s : r.exact) {
    exact.push_back({{"pd", s.dispatch.pd},
                     {"cost", s.cost},
                     {"lambda", s.lambda},
                     {"pg", s.dispatch.pg}});
  }
  auto& results = j["results"] = nlohmann::json::array();
  for (const auto& res : r.results) results.push_back(result_json(res));
  j["oracle_solves"] = r.oracle_solves;
}

void from_json(const nlohmann::json& j, BenchmarkReport& r) {
  try {
    r.eval_pds = j.at("eval_pds").get<std::vector<double>>();
    r.models = j.at("models").get<std::vector<std::string>>();
    r.strategies.clear();
    for (const auto& s : j.at("strategies")) r.strategies.push_back(parse_strategy(s.get<std::string>()));
    r.bus_ids = j.at("bus_ids").get<std::vector<int>>();
    r.error_constants = j.value("error_constants", false) ? Constants::kInclude : Constants::kExclude;
    r.few_shot.clear();
    for (const auto& ex : j.value("few_shot", nlohmann::json::array())) {
      const double pd = ex.at("pd").get<double>();
      r.few_shot.push_back({pd, ex.at("cost").get<double>(),
                            Dispatch{ex.at("pg").get<std::vector<double>>(), pd}});
    }
    r.exact.clear();
    for (const auto& s : j.at("exact")) {
      EdSolution sol;
      sol.dispatch = Dispatch{s.at("pg").get<std::vector<double>>(), s.at("pd").get<double>()};
      sol.cost = s.at("cost").get<double>();
      sol.lambda = s.at("lambda").get<double>();
      sol.constants = r.error_constants;
      r.exact.push_back(std::move(sol));
    }
    r.results.clear();
    for (const auto& res : j.at("results")) r.results.push_back(result_from_json(res));
    r.oracle_solves = j.value("oracle_solves", r.exact.size());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("benchmark results: ") + e.what());
  }
  r.summaries = summarize(r.results);
}

}  // namespace edbench
