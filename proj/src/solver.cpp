#include "edbench/solver.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "edbench/errors.h"

namespace edbench {

namespace {

constexpr int kMaxBisections = 200;
constexpr int kPolishSteps = 3;

double response(const GeneratorUnit& u, double lambda) {
  if (u.a == 0.0) return lambda > u.b ? u.p_max : u.p_min;
  return std::clamp((lambda - u.b) / (2.0 * u.a), u.p_min, u.p_max);
}

void fill_response(const PowerSystem& sys, double lambda, std::vector<double>& pg) {
  const auto units = sys.units();
  for (std::size_t i = 0; i < units.size(); ++i) pg[i] = response(units[i], lambda);
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// Newton steps on the piecewise-linear supply curve. Each step is exact while
// the set of units strictly inside their boxes does not change; a step that
// does not reduce the imbalance is rejected.
void polish(const PowerSystem& sys, double pd, double& lambda, std::vector<double>& pg) {
  const auto units = sys.units();
  std::vector<double> trial(pg.size());
  for (int step = 0; step < kPolishSteps; ++step) {
    const double residual = pd - sum(pg);
    if (residual == 0.0) return;
    double slope = 0.0;
    for (std::size_t i = 0; i < units.size(); ++i) {
      if (units[i].a > 0.0 && pg[i] > units[i].p_min && pg[i] < units[i].p_max) {
        slope += 1.0 / (2.0 * units[i].a);
      }
    }
    if (slope == 0.0) return;
    const double next = lambda + residual / slope;
    fill_response(sys, next, trial);
    if (std::abs(pd - sum(trial)) >= std::abs(residual)) return;
    lambda = next;
    pg.swap(trial);
  }
}

}  // namespace

EdSolution solve_ed(const PowerSystem& sys, double pd, Constants constants) {
  sys.require_feasible(pd);
  const auto units = sys.units();

  EdSolution sol;
  sol.constants = constants;
  sol.dispatch.pd = pd;

  // Boundary demands have a unique feasible point; return it exactly.
  if (pd == sys.pd_min() || pd == sys.pd_max()) {
    const bool lower = pd == sys.pd_min();
    sol.dispatch.pg = lower ? sys.p_min_vector() : sys.p_max_vector();
    double lambda = lower ? std::numeric_limits<double>::infinity()
                          : -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < units.size(); ++i) {
      const double mc = units[i].marginal_cost(sol.dispatch.pg[i]);
      lambda = lower ? std::min(lambda, mc) : std::max(lambda, mc);
    }
    sol.lambda = lambda;
    sol.cost = total_cost(sol.dispatch, sys, constants);
    return sol;
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& u : units) {
    lo = std::min(lo, u.b);
    hi = std::max(hi, u.marginal_cost(u.p_max));
  }

  std::vector<double> pg(units.size());
  for (int it = 0; it < kMaxBisections; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    fill_response(sys, mid, pg);
    if (sum(pg) < pd) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  // Linear-cost units whose step lies inside the final bracket are tied at
  // the price; they absorb the residual in proportion to headroom.
  std::vector<std::size_t> tied;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (units[i].a == 0.0 && units[i].b >= lo && units[i].b <= hi) tied.push_back(i);
  }

  double lambda = 0.0;
  if (!tied.empty()) {
    lambda = units[tied.front()].b;
    fill_response(sys, lambda, pg);
    double headroom = 0.0;
    for (std::size_t i : tied) {
      pg[i] = units[i].p_min;
      headroom += units[i].p_max - units[i].p_min;
    }
    const double residual = pd - sum(pg);
    if (headroom > 0.0) {
      const double share = std::clamp(residual / headroom, 0.0, 1.0);
      for (std::size_t i : tied) {
        pg[i] = units[i].p_min + share * (units[i].p_max - units[i].p_min);
      }
    }
  } else {
    lambda = 0.5 * (lo + hi);
    fill_response(sys, lambda, pg);
    polish(sys, pd, lambda, pg);
  }

  sol.dispatch.pg = std::move(pg);
  sol.lambda = lambda;
  sol.cost = total_cost(sol.dispatch, sys, constants);
  return sol;
}

KktReport check_kkt(const PowerSystem& sys, const EdSolution& solution) {
  const auto& d = solution.dispatch;
  check_dispatch(d, sys);
  const Violations v = violations(d, sys);

  KktReport report;
  report.balance = v.balance;
  report.bounds = v.generation;
  const auto units = sys.units();
  for (std::size_t i = 0; i < units.size(); ++i) {
    const auto& u = units[i];
    if (u.p_min == u.p_max) continue;  // fixed unit: any multiplier sign
    const double mc = u.marginal_cost(d.pg[i]);
    if (d.pg[i] >= u.p_max) {
      report.upper_gap = std::max(report.upper_gap, mc - solution.lambda);
    } else if (d.pg[i] <= u.p_min) {
      report.lower_gap = std::max(report.lower_gap, solution.lambda - mc);
    } else {
      report.interior_gap = std::max(report.interior_gap, std::abs(mc - solution.lambda));
    }
  }
  return report;
}

}  // namespace edbench
