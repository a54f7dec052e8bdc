#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gbsm/approx.hpp"
#include "gbsm/mdp.hpp"
#include "gbsm/metrics.hpp"

namespace bisim {

/// One trial's worth of bound evaluations: a ground-truth error next to
/// named certified upper bounds, plus the metadata needed to reconstruct
/// soundness margins. Bounds and metadata keep their insertion order so
/// emitted tables have a stable column order.
struct BoundReport {
  std::string experiment;
  double gamma = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double ground_truth = 0.0;
  std::vector<std::pair<std::string, double>> named_bounds;
  double tol = 0.0;
  std::vector<std::pair<std::string, double>> metadata;

  double bound(const std::string& name) const;
};

/// Aggregation error constants of one MDP against its aggregate.
/// sigma = max_s d(s,s) between original and aggregated model (with its
/// one-sided gap), sigma_tilde = max_s d~(s,[s]) on the original alone.
struct SigmaPair {
  double sigma = 0.0;
  double sigma_tilde = 0.0;
  double sigma_gap = 0.0;
  double sigma_tilde_gap = 0.0;
  double tol = 0.0;
};

/// f(s') = argmin_s d(s, s'); ties to the lowest source index.
std::vector<int> optimal_state_mapping(const DistanceMatrix& d);

/// Transfer regret bound
///   (2/(1-gamma)) * (max_{s'} d(f(s'), s') + gap) +
///   ((1+gamma)/(1-gamma)) * source_regret,
/// with the metric's a-priori gap added inside the max term so the bound is
/// certified despite the underestimated metric.
double transfer_regret_bound(const DistanceMatrix& d, std::span<const int> state_map,
                             double source_regret, double gamma);

/// Identical-state-space relaxation using the TV metric:
///   (2/(1-gamma)^2) * max_s d_TV(s,s) + ((1+gamma)/(1-gamma)) * source_regret.
double identical_space_transfer_bound(const TabularMdp& m1, const TabularMdp& m2,
                                      double source_regret);

/// max_s |V*(s) - V^pi(s)| by exact evaluation at tolerance tol.
double ground_truth_regret(const TabularMdp& mdp, const Policy& policy, double tol);

/// Action mapping for lax transfer: g(s', a) picks the target action
/// minimizing delta(d_lax)((f(s'), a), (s', a')); ties to the lowest index.
struct LaxActionMapping {
  int n_source_actions = 0;
  std::vector<int> actions;  // [target_state][source_action]

  int at(int target_state, int source_action) const {
    return actions[target_state * n_source_actions + source_action];
  }
};

LaxActionMapping lax_action_mapping(const TabularMdp& m1, const TabularMdp& m2,
                                    std::span<const int> state_map,
                                    const DistanceMatrix& d_lax);

/// Computes both aggregation constants for one MDP. m_agg must equal
/// aggregate_mdp(m, agg).
SigmaPair sigma_pair(const TabularMdp& m, const TabularMdp& m_agg,
                     const AggregationMap& agg, double tol);

/// sigma_1 + sigma_2 plus both a-priori gaps.
double gbsm_aggregation_bound(const SigmaPair& s1, const SigmaPair& s2);

/// Baseline aggregation bounds computed from single-MDP metrics:
/// zhang = 2 max(st1, st2) / (1-gamma), ferns = zhang * (2+gamma).
struct BsmAggregationBounds {
  double ferns = 0.0;
  double zhang = 0.0;
};

BsmAggregationBounds bsm_aggregation_bounds(double sigma_tilde_1, double sigma_tilde_2,
                                            double gamma);

/// max_s d(m1, m1_hat)(s,s) + max_s' d(m2, m2_hat)(s',s') plus gaps.
double gbsm_estimation_bound(const TabularMdp& m1, const TabularMdp& m1_hat,
                             const TabularMdp& m2, const TabularMdp& m2_hat, double tol);

/// Baseline estimation bound from the single-MDP metric:
///   (2 gamma / (1-gamma)) * max_{a,s} W1(P_hat(.|s,a), P(.|s,a); d~).
double bsm_estimation_bound(const TabularMdp& m, const TabularMdp& m_hat, double tol);

/// Smallest sample count K with
///   K >= -ln(alpha/2) * gamma^2 * rbar^2 * n_states^2 / (2 eps^2 (1-gamma)^4).
std::int64_t sample_complexity(double eps, double alpha, double gamma, double rbar,
                               int n_states);

/// Max entrywise absolute difference between two equally-shaped metrics.
double metric_approximation_error(const DistanceMatrix& a, const DistanceMatrix& b);

}  // namespace bisim
