#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "edbench/power_system.h"

namespace edbench {

// Bumped whenever any prompt wording or layout changes; part of every
// fingerprint, so recorded fixtures keyed by an old template stop matching.
inline constexpr std::string_view kPromptTemplateVersion = "ed-fewshot/1";

enum class Strategy { kNonEvolutionary, kEvolutionary };

std::string_view to_string(Strategy s);
// Accepts "non-evolutionary" / "evolutionary"; throws ConfigError otherwise.
Strategy parse_strategy(std::string_view s);

struct FewShotExample {
  double pd = 0.0;
  double cost = 0.0;  // $/h, constants excluded
  Dispatch dispatch;
};

// Solved examples shown to the model, ordered by strictly increasing demand.
class FewShotSet {
 public:
  // Throws ValidationError if the set is empty, demands are not strictly
  // increasing, or any dispatch misses its demand by more than 1e-6 MW;
  // DimensionError if dispatch lengths differ.
  explicit FewShotSet(std::vector<FewShotExample> examples);

  std::span<const FewShotExample> examples() const { return examples_; }
  std::size_t size() const { return examples_.size(); }

 private:
  std::vector<FewShotExample> examples_;
};

// linspace(700, 6500, 5) = {700, 2150, 3600, 5050, 6500}.
std::vector<double> default_few_shot_pds();

std::vector<double> linspace(double first, double last, std::size_t count);

// Solves each demand exactly and records (pd, cost without constants,
// dispatch). Throws InfeasibleError on the first infeasible demand.
FewShotSet build_few_shot_set(const PowerSystem& sys, std::span<const double> pds);

struct PromptBundle {
  Strategy strategy = Strategy::kNonEvolutionary;
  double target_pd = 0.0;
  std::string text;
  std::string fingerprint;  // hex SHA-256
};

// Byte-identical output for identical inputs. Numbers carry at most two
// decimals with trailing zeros dropped. Unit limits and cost coefficients never
// appear; the model sees only solved examples.
//
// Throws InfeasibleError when target_pd is outside the system's range.
PromptBundle render_prompt(const PowerSystem& sys, const FewShotSet& fs, double target_pd,
                           Strategy strategy);

// SHA-256 over template version, strategy, target demand and the few-shot
// examples as rendered.
std::string prompt_fingerprint(const FewShotSet& fs, double target_pd, Strategy strategy);

void to_json(nlohmann::json& j, const PromptBundle& b);
void from_json(const nlohmann::json& j, PromptBundle& b);

// Few-shot demands and evaluation demands of one experiment.
struct ScenarioSpec {
  std::vector<double> few_shot_pds;
  std::vector<double> eval_pds;

  // Throws InfeasibleError for an out-of-range demand and ValidationError for
  // empty lists or a demand present in both lists.
  void validate(const PowerSystem& sys) const;
};

// The ten evaluation demands of the reference experiment.
std::vector<double> default_eval_pds();

// `count` distinct integer demands drawn uniformly from [pd_min, pd_max],
// skipping anything in `exclude`; returned in draw order.
std::vector<double> random_eval_pds(const PowerSystem& sys, std::size_t count,
                                    std::uint64_t seed, std::span<const double> exclude);

}  // namespace edbench
