#pragma once

#include <string>
#include <vector>

#include "gbsm/matrix.hpp"
#include "gbsm/mdp.hpp"
#include "gbsm/schedule.hpp"
#include "gbsm/transport.hpp"

namespace bisim {

enum class MetricKind { bsm, gbsm, lax, on_policy };

/// State-pair distances d(s, s') between an ordered pair of MDPs, with the
/// iteration metadata needed to reason about one-sided error: the fixed
/// point is underestimated by at most a_priori_gap.
struct DistanceMatrix {
  Matrix values;  // |S1| x |S2|
  std::string direction = "1-2";
  int iterations_run = 0;
  double a_priori_gap = 0.0;
  MetricKind kind = MetricKind::gbsm;
  double tol = 0.0;
};

/// Bisimulation distance between states of two MDPs sharing an action space
/// and discount: the fixed point of
///   d(s,s') = max_a { |R1(s,a) - R2(s',a)| + gamma * W1(P1, P2; d) },
/// iterated from d = 0 for the a-priori step count, so the result
/// underestimates the fixed point by at most tol.
DistanceMatrix gbsm(const TabularMdp& m1, const TabularMdp& m2, double tol);

/// Single-MDP bisimulation metric; same code path as gbsm(m, m, tol).
DistanceMatrix bsm(const TabularMdp& m, double tol);

/// The first n_max iterates d_1 .. d_n of the gbsm recursion, for
/// convergence and monotonicity checks.
std::vector<DistanceMatrix> gbsm_iterates(const TabularMdp& m1, const TabularMdp& m2,
                                          int n_max);

/// Lax variant for differing action spaces: each step applies the
/// two-sided max-min (Hausdorff) of
///   delta(d)((s,a),(s',a')) = |R1(s,a) - R2(s',a')| + gamma * W1(P1, P2; d)
/// over the two action sets.
DistanceMatrix lax_gbsm(const TabularMdp& m1, const TabularMdp& m2, double tol);

/// On-policy variant over policy-averaged rewards and transitions. The
/// policy must fit both MDPs, and the stopping rule uses the span of the
/// averaged rewards.
DistanceMatrix on_policy_gbsm(const TabularMdp& m1, const TabularMdp& m2,
                              const Policy& policy, double tol);

/// Per-state TV relaxation on a shared state space:
///   d_TV(s,s) = max_a { |R1(s,a) - R2(s,a)|
///                       + (gamma * rbar / (1 - gamma)) * TV(P1, P2) }.
/// max_s d(s,s) <= max_s d_TV(s,s) / (1 - gamma).
std::vector<double> tv_upper_metric(const TabularMdp& m1, const TabularMdp& m2);

/// On-policy counterpart of tv_upper_metric over averaged models.
std::vector<double> on_policy_tv_upper_metric(const TabularMdp& m1,
                                              const TabularMdp& m2,
                                              const Policy& policy);

/// CSV with header "s,s_prime,distance", one row per state pair,
/// 17-significant-digit decimals.
std::string distance_matrix_to_csv(const DistanceMatrix& d);
void write_distance_csv(const DistanceMatrix& d, const std::string& path);

}  // namespace bisim
