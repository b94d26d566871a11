#include "edbench/ga.h"

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "edbench/errors.h"

namespace edbench {

namespace {

constexpr double kRepairTol = 1e-9;
constexpr int kMaxRepairPasses = 64;
// Candidates with more total violation than this rank behind every feasible one.
constexpr double kFeasibleTol = 1e-9;

struct Candidate {
  std::vector<double> pg;
  double cost = 0.0;
  double violation = 0.0;
};

// Feasible first, then cheaper; infeasible candidates ordered by violation.
bool better(const Candidate& x, const Candidate& y) {
  const bool fx = x.violation <= kFeasibleTol;
  const bool fy = y.violation <= kFeasibleTol;
  if (fx != fy) return fx;
  if (!fx && x.violation != y.violation) return x.violation < y.violation;
  return x.cost < y.cost;
}

class Engine {
 public:
  Engine(const PowerSystem& sys, double pd, const GaConfig& cfg)
      : sys_(sys), pd_(pd), cfg_(cfg), rng_(cfg.seed) {}

  Candidate make(std::vector<double> pg) {
    Dispatch d{std::move(pg), pd_};
    if (cfg_.repair) d = repair_balance(d, sys_);
    Candidate c;
    const Violations v = violations(d, sys_);
    c.violation = v.generation + v.balance;
    c.cost = total_cost(d, sys_);
    c.pg = std::move(d.pg);
    ++evaluations_;
    return c;
  }

  Candidate child(const std::vector<Candidate>& source) {
    std::uniform_int_distribution<std::size_t> pick(0, source.size() - 1);
    const std::size_t i = pick(rng_);
    std::size_t j = pick(rng_);
    if (source.size() > 1) {
      while (j == i) j = pick(rng_);
    }
    return make(mutate(crossover(source[i].pg, source[j].pg)));
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  std::vector<double> crossover(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> out(x.size());
    if (cfg_.crossover == Crossover::kUniform) {
      std::bernoulli_distribution coin(0.5);
      for (std::size_t g = 0; g < out.size(); ++g) out[g] = coin(rng_) ? x[g] : y[g];
    } else {
      std::size_t cut = 0;
      if (out.size() > 1) {
        cut = std::uniform_int_distribution<std::size_t>(1, out.size() - 1)(rng_);
      }
      for (std::size_t g = 0; g < out.size(); ++g) out[g] = g < cut ? x[g] : y[g];
    }
    return out;
  }

  std::vector<double> mutate(std::vector<double> pg) {
    std::normal_distribution<double> noise(0.0, 1.0);
    const auto units = sys_.units();
    std::bernoulli_distribution hit(cfg_.mutation_rate);
    for (std::size_t g = 0; g < pg.size(); ++g) {
      if (!hit(rng_)) continue;
      const double range = units[g].p_max - units[g].p_min;
      pg[g] = std::clamp(pg[g] + cfg_.mutation_sigma * range * noise(rng_), units[g].p_min,
                         units[g].p_max);
    }
    return pg;
  }

  const PowerSystem& sys_;
  double pd_;
  const GaConfig& cfg_;
  std::mt19937_64 rng_;
  std::size_t evaluations_ = 0;
};

const Candidate& best_of(const std::vector<Candidate>& pool) {
  return *std::min_element(pool.begin(), pool.end(), better);
}

}  // namespace

GaConfig GaConfig::paper_faithful(std::uint64_t seed) {
  GaConfig cfg;
  cfg.population_target = 10;
  cfg.generations = 1;
  cfg.mutation_rate = 1.0;
  cfg.parent_source = ParentSource::kOriginal;
  cfg.survival = Survival::kGenerational;
  cfg.seed = seed;
  return cfg;
}

void GaConfig::validate() const {
  if (population_target < 2) throw ConfigError("population_target must be >= 2");
  if (!(mutation_sigma > 0.0 && mutation_sigma <= 1.0)) {
    throw ConfigError("mutation_sigma must be in (0, 1]");
  }
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
    throw ConfigError("mutation_rate must be in [0, 1]");
  }
}

Dispatch repair_balance(const Dispatch& d, const PowerSystem& sys) {
  check_dispatch(d, sys);
  sys.require_feasible(d.pd);
  const auto units = sys.units();

  Dispatch out = d;
  for (std::size_t i = 0; i < units.size(); ++i) {
    out.pg[i] = std::clamp(out.pg[i], units[i].p_min, units[i].p_max);
  }

  for (int pass = 0; pass < kMaxRepairPasses; ++pass) {
    const double residual = out.pd - out.total();
    if (std::abs(residual) <= kRepairTol) break;
    const bool deficit = residual > 0.0;
    double headroom = 0.0;
    for (std::size_t i = 0; i < units.size(); ++i) {
      headroom += deficit ? units[i].p_max - out.pg[i] : out.pg[i] - units[i].p_min;
    }
    if (headroom <= 0.0) break;
    const double share = std::abs(residual) / headroom;
    for (std::size_t i = 0; i < units.size(); ++i) {
      const auto& u = units[i];
      if (share >= 1.0) {
        out.pg[i] = deficit ? u.p_max : u.p_min;
      } else if (deficit) {
        out.pg[i] = std::min(u.p_max, out.pg[i] + share * (u.p_max - out.pg[i]));
      } else {
        out.pg[i] = std::max(u.p_min, out.pg[i] - share * (out.pg[i] - u.p_min));
      }
    }
  }
  return out;
}

GaResult evolve(const PowerSystem& sys, double pd, std::span<const Dispatch> parents,
                const GaConfig& cfg) {
  cfg.validate();
  if (parents.empty()) throw ConfigError("evolve needs at least one parent dispatch");
  for (const auto& p : parents) check_dispatch(p, sys);
  sys.require_feasible(pd);

  Engine engine(sys, pd, cfg);
  std::vector<Candidate> originals;
  originals.reserve(parents.size());
  for (const auto& p : parents) originals.push_back(engine.make(p.pg));

  std::vector<Candidate> pool = originals;
  Candidate best = best_of(pool);
  GaResult result;
  result.history.push_back(best.cost);

  std::vector<Candidate> children;
  for (std::size_t gen = 0; gen < cfg.generations; ++gen) {
    const auto& source = cfg.parent_source == ParentSource::kOriginal ? originals : pool;
    children.clear();
    for (std::size_t k = 0; k < cfg.population_target; ++k) {
      children.push_back(engine.child(source));
    }
    switch (cfg.survival) {
      case Survival::kGenerational:
        break;
      case Survival::kElitist: {
        const Candidate& elite = best_of(pool);
        auto worst = std::max_element(children.begin(), children.end(), better);
        if (better(elite, *worst)) *worst = elite;
        break;
      }
      case Survival::kTruncation:
        children.insert(children.end(), pool.begin(), pool.end());
        std::stable_sort(children.begin(), children.end(), better);
        children.resize(cfg.population_target);
        break;
    }
    pool.swap(children);
    const Candidate& gen_best = best_of(pool);
    if (better(gen_best, best)) best = gen_best;
    result.history.push_back(gen_best.cost);
  }

  result.best = Dispatch{best.pg, pd};
  result.best_cost = best.cost;
  result.evaluations = engine.evaluations();
  return result;
}

std::string_view to_string(Crossover c) {
  return c == Crossover::kUniform ? "uniform" : "single-point";
}

std::string_view to_string(ParentSource s) {
  return s == ParentSource::kOriginal ? "original" : "pool";
}

std::string_view to_string(Survival s) {
  switch (s) {
    case Survival::kGenerational:
      return "generational";
    case Survival::kElitist:
      return "elitist";
    case Survival::kTruncation:
      return "truncation";
  }
  return "truncation";
}

void to_json(nlohmann::json& j, const GaConfig& cfg) {
  j = nlohmann::json{{"population_target", cfg.population_target},
                     {"generations", cfg.generations},
                     {"mutation_rate", cfg.mutation_rate},
                     {"mutation_sigma", cfg.mutation_sigma},
                     {"crossover", to_string(cfg.crossover)},
                     {"parent_source", to_string(cfg.parent_source)},
                     {"seed", cfg.seed},
                     {"survival", to_string(cfg.survival)},
                     {"repair", cfg.repair}};
}

void from_json(const nlohmann::json& j, GaConfig& cfg) {
  if (!j.is_object()) throw ConfigError("ga config must be an object");
  try {
    if (j.value("preset", std::string()) == "paper-faithful") {
      cfg = GaConfig::paper_faithful();
    }
    cfg.population_target = j.value("population_target", cfg.population_target);
    cfg.generations = j.value("generations", cfg.generations);
    cfg.mutation_sigma = j.value("mutation_sigma", cfg.mutation_sigma);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.mutation_rate = j.value("mutation_rate", cfg.mutation_rate);
    cfg.repair = j.value("repair", cfg.repair);
    if (j.contains("survival")) {
      const auto s = j.at("survival").get<std::string>();
      if (s == "generational") {
        cfg.survival = Survival::kGenerational;
      } else if (s == "elitist") {
        cfg.survival = Survival::kElitist;
      } else if (s == "truncation") {
        cfg.survival = Survival::kTruncation;
      } else {
        throw ConfigError("unknown survival '" + s + "'");
      }
    }
    if (j.contains("crossover")) {
      const auto s = j.at("crossover").get<std::string>();
      if (s == "uniform") {
        cfg.crossover = Crossover::kUniform;
      } else if (s == "single-point") {
        cfg.crossover = Crossover::kSinglePoint;
      } else {
        throw ConfigError("unknown crossover '" + s + "'");
      }
    }
    if (j.contains("parent_source")) {
      const auto s = j.at("parent_source").get<std::string>();
      if (s == "original") {
        cfg.parent_source = ParentSource::kOriginal;
      } else if (s == "pool") {
        cfg.parent_source = ParentSource::kPool;
      } else {
        throw ConfigError("unknown parent_source '" + s + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("ga config: ") + e.what());
  }
  cfg.validate();
}

}  // namespace edbench
