#pragma once

#include "edbench/power_system.h"

namespace edbench {

inline constexpr double kBalanceTol = 1e-6;  // MW
inline constexpr double kKktTol = 1e-6;      // $/MWh

struct EdSolution {
  Dispatch dispatch;
  double cost = 0.0;    // $/h, under `constants`
  double lambda = 0.0;  // $/MWh, system marginal price
  Constants constants = Constants::kExclude;
};

// Global optimum of the lossless economic dispatch by equal incremental cost:
// pg_i(lambda) = clamp((lambda - b_i) / 2a_i, p_min_i, p_max_i), with lambda
// bisected until the clamped outputs meet `pd`.
//
// Units with a_i == 0 respond as a step at lambda = b_i; when the price lands
// on such a step the residual demand is shared among the tied units in
// proportion to their headroom.
//
// Throws InfeasibleError when pd is outside [pd_min, pd_max].
EdSolution solve_ed(const PowerSystem& sys, double pd,
                    Constants constants = Constants::kExclude);

// Worst-case deviations from the optimality conditions of a candidate
// solution. All fields are >= 0; a certificate passes when every field is
// within tolerance.
struct KktReport {
  double balance = 0.0;      // |sum pg - pd|
  double bounds = 0.0;       // MW outside any unit box
  double interior_gap = 0.0; // max |mc_i - lambda| over units inside their box
  double upper_gap = 0.0;    // max (mc_i - lambda) over units at p_max
  double lower_gap = 0.0;    // max (lambda - mc_i) over units at p_min

  bool passes(double balance_tol = kBalanceTol, double kkt_tol = kKktTol) const {
    return balance <= balance_tol && bounds == 0.0 && interior_gap <= kkt_tol &&
           upper_gap <= kkt_tol && lower_gap <= kkt_tol;
  }
};

KktReport check_kkt(const PowerSystem& sys, const EdSolution& solution);

}  // namespace edbench
