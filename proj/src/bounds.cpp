#include "gbsm/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gbsm/errors.hpp"
#include "gbsm/transport.hpp"

namespace bisim {

double BoundReport::bound(const std::string& name) const {
  for (const auto& [key, value] : named_bounds)
    if (key == name) return value;
  throw ParameterError("BoundReport: no bound named " + name);
}

std::vector<int> optimal_state_mapping(const DistanceMatrix& d) {
  std::vector<int> f(d.values.cols(), 0);
  for (std::size_t t = 0; t < d.values.cols(); ++t) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < d.values.rows(); ++s)
      if (d.values(s, t) < best) {  // strict: ties stay at the lowest index
        best = d.values(s, t);
        f[t] = static_cast<int>(s);
      }
  }
  return f;
}

double transfer_regret_bound(const DistanceMatrix& d, std::span<const int> state_map,
                             double source_regret, double gamma) {
  if (state_map.size() != d.values.cols())
    throw ParameterError("transfer_regret_bound: state map length mismatch");
  if (!(source_regret >= 0.0))
    throw ParameterError("transfer_regret_bound: source regret must be nonnegative");
  double worst = 0.0;
  for (std::size_t t = 0; t < d.values.cols(); ++t) {
    const int s = state_map[t];
    if (s < 0 || static_cast<std::size_t>(s) >= d.values.rows())
      throw ParameterError("transfer_regret_bound: state map entry out of range");
    worst = std::max(worst, d.values(s, t));
  }
  return 2.0 / (1.0 - gamma) * (worst + d.a_priori_gap) +
         (1.0 + gamma) / (1.0 - gamma) * source_regret;
}

double identical_space_transfer_bound(const TabularMdp& m1, const TabularMdp& m2,
                                      double source_regret) {
  if (!(source_regret >= 0.0))
    throw ParameterError("identical_space_transfer_bound: source regret must be nonnegative");
  const std::vector<double> tv = tv_upper_metric(m1, m2);
  const double worst = tv.empty() ? 0.0 : *std::max_element(tv.begin(), tv.end());
  const double g = m1.gamma;
  return 2.0 / ((1.0 - g) * (1.0 - g)) * worst + (1.0 + g) / (1.0 - g) * source_regret;
}

double ground_truth_regret(const TabularMdp& mdp, const Policy& policy, double tol) {
  const ValueVector v_star = optimal_values(mdp, tol);
  const ValueVector v_pi = policy_values(mdp, policy, tol);
  double regret = 0.0;
  for (int s = 0; s < mdp.n_states; ++s)
    regret = std::max(regret, std::abs(v_star[s] - v_pi[s]));
  return regret;
}

LaxActionMapping lax_action_mapping(const TabularMdp& m1, const TabularMdp& m2,
                                    std::span<const int> state_map,
                                    const DistanceMatrix& d_lax) {
  if (d_lax.values.rows() != static_cast<std::size_t>(m1.n_states) ||
      d_lax.values.cols() != static_cast<std::size_t>(m2.n_states))
    throw ParameterError("lax_action_mapping: metric shape does not match the MDP pair");
  if (state_map.size() != static_cast<std::size_t>(m2.n_states))
    throw ParameterError("lax_action_mapping: state map length mismatch");

  detail::TransportWorkspace ws;
  const TransportTolerances tols;
  LaxActionMapping g;
  g.n_source_actions = m1.n_actions;
  g.actions.assign(static_cast<std::size_t>(m2.n_states) * m1.n_actions, 0);

  std::vector<int> idx1, idx2;
  std::vector<double> mass1, mass2;
  for (int t = 0; t < m2.n_states; ++t) {
    const int s = state_map[t];
    if (s < 0 || s >= m1.n_states)
      throw ParameterError("lax_action_mapping: state map entry out of range");
    for (int a = 0; a < m1.n_actions; ++a) {
      auto row1 = m1.transition_row(s, a);
      idx1.clear();
      mass1.clear();
      for (int k = 0; k < m1.n_states; ++k)
        if (row1[k] > 0.0) {
          idx1.push_back(k);
          mass1.push_back(row1[k]);
        }
      double best = std::numeric_limits<double>::infinity();
      int best_action = 0;
      for (int b = 0; b < m2.n_actions; ++b) {
        auto row2 = m2.transition_row(t, b);
        idx2.clear();
        mass2.clear();
        for (int k = 0; k < m2.n_states; ++k)
          if (row2[k] > 0.0) {
            idx2.push_back(k);
            mass2.push_back(row2[k]);
          }
        const double w = ws.min_cost_value(idx1, mass1, idx2, mass2, d_lax.values, tols);
        const double delta = std::abs(m1.rewards(s, a) - m2.rewards(t, b)) +
                             m1.gamma * w;
        if (delta < best) {
          best = delta;
          best_action = b;
        }
      }
      g.actions[static_cast<std::size_t>(t) * m1.n_actions + a] = best_action;
    }
  }
  return g;
}

SigmaPair sigma_pair(const TabularMdp& m, const TabularMdp& m_agg,
                     const AggregationMap& agg, double tol) {
  if (m_agg != aggregate_mdp(m, agg))
    throw ParameterError("sigma_pair: m_agg is not the aggregation of m under agg");

  SigmaPair out;
  out.tol = tol;

  const DistanceMatrix d_cross = gbsm(m, m_agg, tol);
  for (int s = 0; s < m.n_states; ++s)
    out.sigma = std::max(out.sigma, d_cross.values(s, s));
  out.sigma_gap = d_cross.a_priori_gap;

  const DistanceMatrix d_self = bsm(m, tol);
  for (int s = 0; s < m.n_states; ++s)
    out.sigma_tilde = std::max(out.sigma_tilde, d_self.values(s, agg.map[s]));
  out.sigma_tilde_gap = d_self.a_priori_gap;
  return out;
}

double gbsm_aggregation_bound(const SigmaPair& s1, const SigmaPair& s2) {
  return s1.sigma + s1.sigma_gap + s2.sigma + s2.sigma_gap;
}

BsmAggregationBounds bsm_aggregation_bounds(double sigma_tilde_1, double sigma_tilde_2,
                                            double gamma) {
  const double worst = std::max(sigma_tilde_1, sigma_tilde_2);
  BsmAggregationBounds b;
  b.zhang = 2.0 * worst / (1.0 - gamma);
  b.ferns = 2.0 * worst * (2.0 + gamma) / (1.0 - gamma);
  return b;
}

double gbsm_estimation_bound(const TabularMdp& m1, const TabularMdp& m1_hat,
                             const TabularMdp& m2, const TabularMdp& m2_hat,
                             double tol) {
  if (m1.n_states != m1_hat.n_states || m1.n_actions != m1_hat.n_actions ||
      m2.n_states != m2_hat.n_states || m2.n_actions != m2_hat.n_actions)
    throw IncompatibilityError("gbsm_estimation_bound: estimated MDP shapes differ");
  const auto padded_diag_max = [tol](const TabularMdp& original,
                                     const TabularMdp& estimate) {
    const DistanceMatrix d = gbsm(original, estimate, tol);
    double diag = 0.0;
    for (int s = 0; s < original.n_states; ++s) diag = std::max(diag, d.values(s, s));
    return diag + d.a_priori_gap;
  };
  return padded_diag_max(m1, m1_hat) + padded_diag_max(m2, m2_hat);
}

double bsm_estimation_bound(const TabularMdp& m, const TabularMdp& m_hat, double tol) {
  if (m.n_states != m_hat.n_states || m.n_actions != m_hat.n_actions ||
      m.gamma != m_hat.gamma)
    throw IncompatibilityError("bsm_estimation_bound: shapes differ");
  const DistanceMatrix d_self = bsm(m, tol);

  detail::TransportWorkspace ws;
  const TransportTolerances tols;
  std::vector<int> idx1, idx2;
  std::vector<double> mass1, mass2;
  double worst = 0.0;
  for (int s = 0; s < m.n_states; ++s)
    for (int a = 0; a < m.n_actions; ++a) {
      auto hat_row = m_hat.transition_row(s, a);
      auto row = m.transition_row(s, a);
      idx1.clear();
      mass1.clear();
      idx2.clear();
      mass2.clear();
      for (int k = 0; k < m.n_states; ++k) {
        if (hat_row[k] > 0.0) {
          idx1.push_back(k);
          mass1.push_back(hat_row[k]);
        }
        if (row[k] > 0.0) {
          idx2.push_back(k);
          mass2.push_back(row[k]);
        }
      }
      worst = std::max(
          worst, ws.min_cost_value(idx1, mass1, idx2, mass2, d_self.values, tols));
    }
  return 2.0 * m.gamma / (1.0 - m.gamma) * worst;
}

std::int64_t sample_complexity(double eps, double alpha, double gamma, double rbar,
                               int n_states) {
  if (!(eps > 0.0)) throw ParameterError("sample_complexity: eps must be positive");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ParameterError("sample_complexity: alpha must be in (0, 1)");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw ParameterError("sample_complexity: gamma must be in [0, 1)");
  if (!(rbar >= 0.0)) throw ParameterError("sample_complexity: rbar must be nonnegative");
  if (n_states <= 0) throw ParameterError("sample_complexity: n_states must be positive");
  const double one_minus = 1.0 - gamma;
  const double value = -std::log(alpha / 2.0) * gamma * gamma * rbar * rbar *
                       static_cast<double>(n_states) * n_states /
                       (2.0 * eps * eps * one_minus * one_minus * one_minus * one_minus);
  return static_cast<std::int64_t>(std::ceil(value));
}

double metric_approximation_error(const DistanceMatrix& a, const DistanceMatrix& b) {
  if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols())
    throw ParameterError("metric_approximation_error: shapes differ");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.values.rows(); ++i)
    for (std::size_t j = 0; j < a.values.cols(); ++j)
      worst = std::max(worst, std::abs(a.values(i, j) - b.values(i, j)));
  return worst;
}

}  // namespace bisim
