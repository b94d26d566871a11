#pragma once

#include <filesystem>
#include <istream>
#include <span>
#include <string_view>
#include <vector>

namespace edbench {

// One thermal unit with quadratic cost a*P^2 + b*P + c ($/h), P in MW.
struct GeneratorUnit {
  int bus_id = 0;
  double p_min = 0.0;  // MW
  double p_max = 0.0;  // MW
  double a = 0.0;      // $/MW^2h
  double b = 0.0;      // $/MWh
  double c = 0.0;      // $/h

  double marginal_cost(double pg) const { return b + 2.0 * a * pg; }
  double cost(double pg) const { return (a * pg + b) * pg; }

  friend bool operator==(const GeneratorUnit&, const GeneratorUnit&) = default;
};

// Immutable, validated set of units. Unit order is the canonical index order
// for every dispatch vector.
class PowerSystem {
 public:
  // Throws ValidationError if `units` is empty or any unit breaks
  // 0 <= p_min <= p_max, a >= 0, or has non-finite fields.
  explicit PowerSystem(std::vector<GeneratorUnit> units);

  std::span<const GeneratorUnit> units() const { return units_; }
  const GeneratorUnit& unit(std::size_t i) const { return units_.at(i); }
  std::size_t size() const { return units_.size(); }

  double pd_min() const { return pd_min_; }
  double pd_max() const { return pd_max_; }
  double constant_cost() const { return constant_cost_; }

  std::vector<double> p_min_vector() const;
  std::vector<double> p_max_vector() const;

  bool is_feasible_demand(double pd) const {
    return pd >= pd_min_ && pd <= pd_max_;
  }
  // Throws InfeasibleError naming the violated bound.
  void require_feasible(double pd) const;

 private:
  std::vector<GeneratorUnit> units_;
  double pd_min_ = 0.0;
  double pd_max_ = 0.0;
  double constant_cost_ = 0.0;
};

// Per-unit generation (MW) paired with its target demand.
struct Dispatch {
  std::vector<double> pg;
  double pd = 0.0;

  double total() const;

  friend bool operator==(const Dispatch&, const Dispatch&) = default;
};

// Throws DimensionError on length mismatch and ValidationError on
// non-finite entries.
void check_dispatch(const Dispatch& d, const PowerSystem& sys);

// System file loading. The stream may hold the CSV form
// (`bus,p_min,p_max,a,b,c` header) or the JSON mirror (array of unit objects,
// or an object with a "units" array); the format is sniffed from the first
// non-blank character.
PowerSystem load_system(std::istream& in);
PowerSystem load_system_file(const std::filesystem::path& path);
PowerSystem parse_system_csv(std::string_view text);
PowerSystem parse_system_json(std::string_view text);

enum class Constants { kExclude, kInclude };

// Sum of a*pg^2 + b*pg, plus sum of c when constants are included.
double total_cost(const Dispatch& d, const PowerSystem& sys,
                  Constants constants = Constants::kExclude);

struct Violations {
  double generation = 0.0;  // MW outside the unit boxes, summed over units
  double balance = 0.0;     // |sum pg - pd|, MW
};

Violations violations(const Dispatch& d, const PowerSystem& sys);

}  // namespace edbench
