#pragma once

#include <cmath>

#include "gbsm/errors.hpp"

namespace bisim {

/// A-priori stopping rule for gamma-contracting fixed-point iterations.
///
/// n_star is the smallest n with gamma^n * rbar / (1 - gamma) <= tol, with
/// the conventions n_star = 1 for gamma == 0 (one step is exact) and
/// n_star = 0 for rbar == 0 (the fixed point is identically zero).
struct IterationSchedule {
  double tol = 0.0;
  int n_star = 0;
};

inline IterationSchedule iteration_count(double gamma, double rbar, double tol) {
  if (!(tol > 0.0)) throw ParameterError("iteration_count: tol must be positive");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw ParameterError("iteration_count: gamma must be in [0, 1)");
  if (!(rbar >= 0.0)) throw ParameterError("iteration_count: rbar must be nonnegative");

  IterationSchedule sched{tol, 0};
  if (rbar == 0.0) return sched;
  if (gamma == 0.0) {
    sched.n_star = 1;
    return sched;
  }
  const double bound0 = rbar / (1.0 - gamma);
  if (bound0 <= tol) return sched;

  int n = static_cast<int>(std::ceil(std::log(tol * (1.0 - gamma) / rbar) / std::log(gamma)));
  if (n < 0) n = 0;
  // Snap to the exact smallest n; the log/ceil estimate can be off by one ulp.
  while (std::pow(gamma, n) * bound0 > tol) ++n;
  while (n > 0 && std::pow(gamma, n - 1) * bound0 <= tol) --n;
  sched.n_star = n;
  return sched;
}

}  // namespace bisim
