#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "edbench/power_system.h"

namespace edbench {

enum class Crossover { kUniform, kSinglePoint };

// How the next pool is formed from the current pool and its children.
enum class Survival {
  kGenerational,  // children replace the pool outright
  kElitist,       // children replace the pool; the best member survives
  kTruncation,    // best population_target of pool + children
};

// Where each generation draws its two parents from.
enum class ParentSource {
  kOriginal,  // the supplied parent dispatches every generation
  kPool,      // the current candidate pool (classic iterative GA)
};

struct GaConfig {
  std::size_t population_target = 10;
  std::size_t generations = 1;
  double mutation_rate = 0.2;     // per-gene probability of mutation
  double mutation_sigma = 0.2;    // fraction of (p_max - p_min), per gene
  Crossover crossover = Crossover::kUniform;
  ParentSource parent_source = ParentSource::kPool;
  Survival survival = Survival::kTruncation;
  std::uint64_t seed = 0;
  bool repair = true;

  bool elitist() const { return survival != Survival::kGenerational; }

  // One pass producing ten candidates from the supplied parents, every gene
  // mutated, no carryover: the evolutionary prompt followed literally.
  static GaConfig paper_faithful(std::uint64_t seed = 0);

  // Throws ConfigError.
  void validate() const;
};

struct GaResult {
  Dispatch best;
  double best_cost = 0.0;       // total_cost(best), constants excluded
  std::vector<double> history;  // best pool cost; [0] is the seeded pool, [k] after generation k
  std::size_t evaluations = 0;
};

// Shifts the imbalance pd - sum(pg) onto the units in proportion to their
// remaining headroom (toward p_max on a deficit, toward p_min on a surplus),
// after clamping every entry into its box. The result lies inside the boxes
// and sums to d.pd within 1e-9 MW.
//
// Throws InfeasibleError when d.pd is outside [pd_min, pd_max].
Dispatch repair_balance(const Dispatch& d, const PowerSystem& sys);

// Selection / crossover / mutation / (repair) over a pool of
// cfg.population_target candidates for cfg.generations rounds, seeded by the
// supplied parents retargeted to `pd`. Returns the lowest-cost candidate
// seen; with repair on that candidate is always feasible.
//
// Throws ConfigError on an empty parent set or bad config, DimensionError on
// a parent of the wrong length, InfeasibleError on infeasible pd.
GaResult evolve(const PowerSystem& sys, double pd, std::span<const Dispatch> parents,
                const GaConfig& cfg);

std::string_view to_string(Crossover c);
std::string_view to_string(ParentSource s);
std::string_view to_string(Survival s);

void to_json(nlohmann::json& j, const GaConfig& cfg);
// Missing keys keep their defaults; unknown enum strings throw ConfigError.
void from_json(const nlohmann::json& j, GaConfig& cfg);

}  // namespace edbench
