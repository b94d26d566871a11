#include "edbench/prompt.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "digest.h"
#include "edbench/errors.h"
#include "edbench/format.h"
#include "edbench/solver.h"

namespace edbench {

namespace {

constexpr double kExampleBalanceTol = 1e-6;

constexpr std::string_view kDescriptionHeading = "Description of Problem";
constexpr std::string_view kExamplesHeading = "In-Context Examples (Population)";
constexpr std::string_view kNonEvolutionaryHeading = "Non-Evolutionary Algorithm Task Instruction";
constexpr std::string_view kEvolutionaryHeading = "Evolutionary Algorithm Task Instruction";

constexpr std::string_view kDescription =
    "You are provided with a set of optimal generation dispatches (PG) for various loading "
    "scenarios, each associated with a specific total load demand (PD) and the corresponding "
    "minimum cost. The goal is to determine a new generation dispatch list for a total load "
    "demand, ensuring that the sum of the generation values equals the load demand while "
    "maintaining economic efficiency.";

constexpr std::string_view kNonEvolutionaryTail =
    " MW. The solution should follow the trend observed in the given data, maintaining "
    "proportionality and logical scaling of generator contributions with minimum cost value.";

constexpr std::string_view kEvolutionarySteps =
    "1. Choose two dispatch scenarios from the provided data. These sets serve as parent "
    "solutions for generating a new candidate.\n"
    "2. Combine elements from the two selected parent dispatches to form a new candidate "
    "dispatch.\n"
    "3. Mutate the candidate dispatch obtained from the crossover.\n"
    "4. Repeat the selection, crossover, and mutation steps until you generate 10 candidate "
    "dispatch sets.\n"
    "5. Evaluate these 10 candidates based on their estimated cost, then select the best "
    "solution and provide its vector form.\n";

constexpr std::string_view kEvolutionaryNote =
    "Note: Do not include any code; ensure the solution maintains exact power balance and "
    "respects the observed generator limits.";

std::string target_sentence(double target_pd) {
  return "Generate a new list of generation dispatches PG for a total load demand PD = " +
         format_number(target_pd);
}

std::string render_examples(const FewShotSet& fs) {
  std::string out;
  for (std::size_t k = 0; k < fs.size(); ++k) {
    const auto& ex = fs.examples()[k];
    if (k > 0) out += '\n';
    out += "PD = " + format_number(ex.pd) + " MW, Cost = " + format_number(ex.cost) + "\n";
    out += "PG = " + format_vector(ex.dispatch.pg) + "\n";
  }
  return out;
}

}  // namespace

std::string_view to_string(Strategy s) {
  return s == Strategy::kNonEvolutionary ? "non-evolutionary" : "evolutionary";
}

Strategy parse_strategy(std::string_view s) {
  if (s == "non-evolutionary") return Strategy::kNonEvolutionary;
  if (s == "evolutionary") return Strategy::kEvolutionary;
  throw ConfigError("unknown strategy '" + std::string(s) +
                    "' (expected non-evolutionary or evolutionary)");
}

FewShotSet::FewShotSet(std::vector<FewShotExample> examples) : examples_(std::move(examples)) {
  if (examples_.empty()) throw ValidationError("few-shot set is empty");
  const std::size_t n = examples_.front().dispatch.pg.size();
  for (std::size_t k = 0; k < examples_.size(); ++k) {
    const auto& ex = examples_[k];
    if (ex.dispatch.pg.size() != n) throw DimensionError(n, ex.dispatch.pg.size());
    if (k > 0 && !(ex.pd > examples_[k - 1].pd)) {
      throw ValidationError("few-shot demands must be strictly increasing");
    }
    if (std::abs(ex.dispatch.total() - ex.pd) > kExampleBalanceTol) {
      throw ValidationError("few-shot example at PD = " + format_number(ex.pd) +
                            " does not sum to its demand");
    }
  }
}

std::vector<double> linspace(double first, double last, std::size_t count) {
  std::vector<double> out;
  if (count == 0) return out;
  if (count == 1) return {first};
  out.reserve(count);
  const double step = (last - first) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k + 1 < count; ++k) out.push_back(first + step * static_cast<double>(k));
  out.push_back(last);
  return out;
}

std::vector<double> default_few_shot_pds() { return linspace(700.0, 6500.0, 5); }

FewShotSet build_few_shot_set(const PowerSystem& sys, std::span<const double> pds) {
  std::vector<FewShotExample> examples;
  examples.reserve(pds.size());
  for (double pd : pds) {
    EdSolution sol = solve_ed(sys, pd);
    examples.push_back({pd, sol.cost, std::move(sol.dispatch)});
  }
  return FewShotSet(std::move(examples));
}

std::string prompt_fingerprint(const FewShotSet& fs, double target_pd, Strategy strategy) {
  std::string canonical;
  canonical += "template=";
  canonical += kPromptTemplateVersion;
  canonical += "\nstrategy=";
  canonical += to_string(strategy);
  canonical += "\ntarget_pd=" + format_roundtrip(target_pd) + "\n";
  canonical += render_examples(fs);
  return detail::sha256_hex(canonical);
}

PromptBundle render_prompt(const PowerSystem& sys, const FewShotSet& fs, double target_pd,
                           Strategy strategy) {
  sys.require_feasible(target_pd);
  if (fs.examples().front().dispatch.pg.size() != sys.size()) {
    throw DimensionError(sys.size(), fs.examples().front().dispatch.pg.size());
  }

  std::string text;
  text += kDescriptionHeading;
  text += '\n';
  text += kDescription;
  text += "\n\n";
  text += kExamplesHeading;
  text += '\n';
  text += render_examples(fs);
  text += '\n';
  if (strategy == Strategy::kNonEvolutionary) {
    text += kNonEvolutionaryHeading;
    text += '\n';
    text += target_sentence(target_pd);
    text += kNonEvolutionaryTail;
    text += '\n';
  } else {
    text += kEvolutionaryHeading;
    text += '\n';
    text += target_sentence(target_pd);
    text += " MW by following these steps:\n";
    text += kEvolutionarySteps;
    text += kEvolutionaryNote;
    text += '\n';
  }

  return PromptBundle{strategy, target_pd, std::move(text),
                      prompt_fingerprint(fs, target_pd, strategy)};
}

void to_json(nlohmann::json& j, const PromptBundle& b) {
  j = nlohmann::json{{"strategy", to_string(b.strategy)},
                     {"target_pd", b.target_pd},
                     {"text", b.text},
                     {"fingerprint", b.fingerprint}};
}

void from_json(const nlohmann::json& j, PromptBundle& b) {
  b.strategy = parse_strategy(j.at("strategy").get<std::string>());
  b.target_pd = j.at("target_pd").get<double>();
  b.text = j.at("text").get<std::string>();
  b.fingerprint = j.at("fingerprint").get<std::string>();
}

void ScenarioSpec::validate(const PowerSystem& sys) const {
  if (few_shot_pds.empty()) throw ValidationError("few_shot_pds is empty");
  if (eval_pds.empty()) throw ValidationError("eval_pds is empty");
  for (double pd : few_shot_pds) sys.require_feasible(pd);
  for (double pd : eval_pds) sys.require_feasible(pd);
  for (double pd : eval_pds) {
    if (std::find(few_shot_pds.begin(), few_shot_pds.end(), pd) != few_shot_pds.end()) {
      throw ValidationError("demand " + format_number(pd) +
                            " MW appears in both few-shot and evaluation sets");
    }
  }
}

std::vector<double> default_eval_pds() {
  return {727, 1257, 2802, 3227, 3747, 3951, 4398, 5627, 5917, 6122};
}

std::vector<double> random_eval_pds(const PowerSystem& sys, std::size_t count,
                                    std::uint64_t seed, std::span<const double> exclude) {
  const auto lo = static_cast<long long>(std::ceil(sys.pd_min()));
  const auto hi = static_cast<long long>(std::floor(sys.pd_max()));
  std::set<long long> taken;
  for (double pd : exclude) {
    if (pd == std::floor(pd)) taken.insert(static_cast<long long>(pd));
  }
  const long long available = hi - lo + 1 - static_cast<long long>(std::count_if(
                                  taken.begin(), taken.end(),
                                  [&](long long v) { return v >= lo && v <= hi; }));
  if (hi < lo || available < static_cast<long long>(count)) {
    throw ValidationError("not enough distinct integer demands in range");
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long long> draw(lo, hi);
  std::vector<double> out;
  while (out.size() < count) {
    const long long v = draw(rng);
    if (taken.insert(v).second) out.push_back(static_cast<double>(v));
  }
  return out;
}

}  // namespace edbench
