#include "gbsm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "gbsm/errors.hpp"

namespace bisim {

namespace {

// Nonzero entries of every transition row, laid out per (s, a).
struct CompactSupports {
  int n_states = 0;
  int n_actions = 0;
  std::vector<std::vector<int>> idx;
  std::vector<std::vector<double>> mass;

  const std::vector<int>& row_idx(int s, int a) const { return idx[s * n_actions + a]; }
  const std::vector<double>& row_mass(int s, int a) const {
    return mass[s * n_actions + a];
  }
};

CompactSupports compact_mdp(const TabularMdp& m) {
  CompactSupports c;
  c.n_states = m.n_states;
  c.n_actions = m.n_actions;
  c.idx.resize(static_cast<std::size_t>(m.n_states) * m.n_actions);
  c.mass.resize(c.idx.size());
  for (int s = 0; s < m.n_states; ++s)
    for (int a = 0; a < m.n_actions; ++a) {
      auto row = m.transition_row(s, a);
      auto& idx = c.idx[s * m.n_actions + a];
      auto& mass = c.mass[s * m.n_actions + a];
      for (int k = 0; k < m.n_states; ++k)
        if (row[k] > 0.0) {
          idx.push_back(k);
          mass.push_back(row[k]);
        }
    }
  return c;
}

struct CompactRows {
  std::vector<std::vector<int>> idx;
  std::vector<std::vector<double>> mass;
};

CompactRows compact_rows(const Matrix& rows) {
  CompactRows c;
  c.idx.resize(rows.rows());
  c.mass.resize(rows.rows());
  for (std::size_t s = 0; s < rows.rows(); ++s) {
    auto row = rows.row(s);
    for (std::size_t k = 0; k < rows.cols(); ++k)
      if (row[k] > 0.0) {
        c.idx[s].push_back(static_cast<int>(k));
        c.mass[s].push_back(row[k]);
      }
  }
  return c;
}

double tv_of_rows(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += std::abs(a[k] - b[k]);
  return std::clamp(0.5 * sum, 0.0, 1.0);
}

double gap_after(double gamma, double rbar, int n) {
  if (rbar == 0.0) return 0.0;
  return std::pow(gamma, n) * rbar / (1.0 - gamma);
}

void require_pair(const TabularMdp& m1, const TabularMdp& m2, bool same_actions) {
  if (same_actions && m1.n_actions != m2.n_actions)
    throw IncompatibilityError("metric: action counts differ");
  if (m1.gamma != m2.gamma)
    throw IncompatibilityError("metric: discount factors differ");
}

// Warm-start bases, one per (s, s', a) cell: supports are fixed across
// sweeps and the cost matrix converges, so later sweeps pivot rarely.
void gbsm_sweep(const TabularMdp& m1, const TabularMdp& m2, const CompactSupports& c1,
                const CompactSupports& c2, const Matrix& prev, Matrix& next,
                detail::TransportWorkspace& ws, const TransportTolerances& tols,
                std::vector<detail::TransportBasis>& bases) {
  const double gamma = m1.gamma;
  for (int s = 0; s < m1.n_states; ++s)
    for (int t = 0; t < m2.n_states; ++t) {
      double best = 0.0;
      for (int a = 0; a < m1.n_actions; ++a) {
        auto& basis = bases[(static_cast<std::size_t>(s) * m2.n_states + t) *
                                m1.n_actions +
                            a];
        const double w = ws.min_cost_value(c1.row_idx(s, a), c1.row_mass(s, a),
                                           c2.row_idx(t, a), c2.row_mass(t, a), prev,
                                           tols, &basis);
        const double val = std::abs(m1.rewards(s, a) - m2.rewards(t, a)) + gamma * w;
        if (val > best) best = val;
      }
      next(s, t) = best;
    }
}

}  // namespace

DistanceMatrix gbsm(const TabularMdp& m1, const TabularMdp& m2, double tol) {
  require_pair(m1, m2, /*same_actions=*/true);
  const double rbar = reward_span(m1, m2);
  const IterationSchedule sched = iteration_count(m1.gamma, rbar, tol);

  const CompactSupports c1 = compact_mdp(m1);
  const CompactSupports c2 = compact_mdp(m2);
  detail::TransportWorkspace ws;
  const TransportTolerances tols;
  std::vector<detail::TransportBasis> bases(
      static_cast<std::size_t>(m1.n_states) * m2.n_states * m1.n_actions);

  Matrix prev(m1.n_states, m2.n_states, 0.0);
  Matrix next(m1.n_states, m2.n_states, 0.0);
  for (int n = 0; n < sched.n_star; ++n) {
    gbsm_sweep(m1, m2, c1, c2, prev, next, ws, tols, bases);
    std::swap(prev, next);
  }

  DistanceMatrix d;
  d.values = std::move(prev);
  d.iterations_run = sched.n_star;
  d.a_priori_gap = gap_after(m1.gamma, rbar, sched.n_star);
  d.kind = MetricKind::gbsm;
  d.tol = tol;
  return d;
}

DistanceMatrix bsm(const TabularMdp& m, double tol) {
  DistanceMatrix d = gbsm(m, m, tol);
  d.kind = MetricKind::bsm;
  d.direction = "1-1";
  return d;
}

std::vector<DistanceMatrix> gbsm_iterates(const TabularMdp& m1, const TabularMdp& m2,
                                          int n_max) {
  require_pair(m1, m2, /*same_actions=*/true);
  if (n_max < 0) throw ParameterError("gbsm_iterates: n_max must be nonnegative");
  const double rbar = reward_span(m1, m2);

  const CompactSupports c1 = compact_mdp(m1);
  const CompactSupports c2 = compact_mdp(m2);
  detail::TransportWorkspace ws;
  const TransportTolerances tols;
  std::vector<detail::TransportBasis> bases(
      static_cast<std::size_t>(m1.n_states) * m2.n_states * m1.n_actions);

  std::vector<DistanceMatrix> out;
  out.reserve(n_max);
  Matrix prev(m1.n_states, m2.n_states, 0.0);
  Matrix next(m1.n_states, m2.n_states, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    gbsm_sweep(m1, m2, c1, c2, prev, next, ws, tols, bases);
    std::swap(prev, next);
    DistanceMatrix d;
    d.values = prev;
    d.iterations_run = n;
    d.a_priori_gap = gap_after(m1.gamma, rbar, n);
    d.kind = MetricKind::gbsm;
    out.push_back(std::move(d));
  }
  return out;
}

DistanceMatrix lax_gbsm(const TabularMdp& m1, const TabularMdp& m2, double tol) {
  require_pair(m1, m2, /*same_actions=*/false);

  // Both sides of the Hausdorff term compare rewards across arbitrary
  // action pairs, so the contraction constant is the cross-action span.
  double max1 = -std::numeric_limits<double>::infinity(), min1 = -max1;
  double max2 = max1, min2 = min1;
  for (double r : m1.rewards.data()) {
    max1 = std::max(max1, r);
    min1 = std::min(min1, r);
  }
  for (double r : m2.rewards.data()) {
    max2 = std::max(max2, r);
    min2 = std::min(min2, r);
  }
  const double rbar = std::max({0.0, max1 - min2, max2 - min1});
  const IterationSchedule sched = iteration_count(m1.gamma, rbar, tol);

  const CompactSupports c1 = compact_mdp(m1);
  const CompactSupports c2 = compact_mdp(m2);
  detail::TransportWorkspace ws;
  const TransportTolerances tols;
  const double gamma = m1.gamma;
  const int a1 = m1.n_actions, a2 = m2.n_actions;
  std::vector<double> delta(static_cast<std::size_t>(a1) * a2);
  std::vector<detail::TransportBasis> bases(
      static_cast<std::size_t>(m1.n_states) * m2.n_states * a1 * a2);

  Matrix prev(m1.n_states, m2.n_states, 0.0);
  Matrix next(m1.n_states, m2.n_states, 0.0);
  for (int n = 0; n < sched.n_star; ++n) {
    for (int s = 0; s < m1.n_states; ++s)
      for (int t = 0; t < m2.n_states; ++t) {
        for (int a = 0; a < a1; ++a)
          for (int b = 0; b < a2; ++b) {
            auto& basis =
                bases[((static_cast<std::size_t>(s) * m2.n_states + t) * a1 + a) * a2 +
                      b];
            const double w = ws.min_cost_value(c1.row_idx(s, a), c1.row_mass(s, a),
                                               c2.row_idx(t, b), c2.row_mass(t, b),
                                               prev, tols, &basis);
            delta[a * a2 + b] = std::abs(m1.rewards(s, a) - m2.rewards(t, b)) + gamma * w;
          }
        double fwd = 0.0;
        for (int a = 0; a < a1; ++a) {
          double mn = std::numeric_limits<double>::infinity();
          for (int b = 0; b < a2; ++b) mn = std::min(mn, delta[a * a2 + b]);
          fwd = std::max(fwd, mn);
        }
        double bwd = 0.0;
        for (int b = 0; b < a2; ++b) {
          double mn = std::numeric_limits<double>::infinity();
          for (int a = 0; a < a1; ++a) mn = std::min(mn, delta[a * a2 + b]);
          bwd = std::max(bwd, mn);
        }
        next(s, t) = std::max(fwd, bwd);
      }
    std::swap(prev, next);
  }

  DistanceMatrix d;
  d.values = std::move(prev);
  d.iterations_run = sched.n_star;
  d.a_priori_gap = gap_after(gamma, rbar, sched.n_star);
  d.kind = MetricKind::lax;
  d.tol = tol;
  return d;
}

DistanceMatrix on_policy_gbsm(const TabularMdp& m1, const TabularMdp& m2,
                              const Policy& policy, double tol) {
  require_pair(m1, m2, /*same_actions=*/true);
  const OnPolicyModel r1 = on_policy_reduce(m1, policy);
  const OnPolicyModel r2 = on_policy_reduce(m2, policy);

  double max1 = -std::numeric_limits<double>::infinity(), min1 = -max1;
  double max2 = max1, min2 = min1;
  for (double r : r1.rewards) {
    max1 = std::max(max1, r);
    min1 = std::min(min1, r);
  }
  for (double r : r2.rewards) {
    max2 = std::max(max2, r);
    min2 = std::min(min2, r);
  }
  const double rbar = std::max({0.0, max1 - min2, max2 - min1});
  const IterationSchedule sched = iteration_count(m1.gamma, rbar, tol);

  const CompactRows c1 = compact_rows(r1.transitions);
  const CompactRows c2 = compact_rows(r2.transitions);
  detail::TransportWorkspace ws;
  const TransportTolerances tols;
  const double gamma = m1.gamma;
  std::vector<detail::TransportBasis> bases(
      static_cast<std::size_t>(m1.n_states) * m2.n_states);

  Matrix prev(m1.n_states, m2.n_states, 0.0);
  Matrix next(m1.n_states, m2.n_states, 0.0);
  for (int n = 0; n < sched.n_star; ++n) {
    for (int s = 0; s < m1.n_states; ++s)
      for (int t = 0; t < m2.n_states; ++t) {
        auto& basis = bases[static_cast<std::size_t>(s) * m2.n_states + t];
        const double w = ws.min_cost_value(c1.idx[s], c1.mass[s], c2.idx[t], c2.mass[t],
                                           prev, tols, &basis);
        next(s, t) = std::abs(r1.rewards[s] - r2.rewards[t]) + gamma * w;
      }
    std::swap(prev, next);
  }

  DistanceMatrix d;
  d.values = std::move(prev);
  d.iterations_run = sched.n_star;
  d.a_priori_gap = gap_after(gamma, rbar, sched.n_star);
  d.kind = MetricKind::on_policy;
  d.tol = tol;
  return d;
}

std::vector<double> tv_upper_metric(const TabularMdp& m1, const TabularMdp& m2) {
  require_pair(m1, m2, /*same_actions=*/true);
  if (m1.n_states != m2.n_states)
    throw IncompatibilityError("tv_upper_metric: state spaces differ");
  const double rbar = reward_span(m1, m2);
  const double coef = m1.gamma * rbar / (1.0 - m1.gamma);
  std::vector<double> out(m1.n_states, 0.0);
  for (int s = 0; s < m1.n_states; ++s) {
    double best = 0.0;
    for (int a = 0; a < m1.n_actions; ++a) {
      const double val =
          std::abs(m1.rewards(s, a) - m2.rewards(s, a)) +
          coef * tv_of_rows(m1.transition_row(s, a), m2.transition_row(s, a));
      best = std::max(best, val);
    }
    out[s] = best;
  }
  return out;
}

std::vector<double> on_policy_tv_upper_metric(const TabularMdp& m1, const TabularMdp& m2,
                                              const Policy& policy) {
  require_pair(m1, m2, /*same_actions=*/true);
  if (m1.n_states != m2.n_states)
    throw IncompatibilityError("on_policy_tv_upper_metric: state spaces differ");
  const OnPolicyModel r1 = on_policy_reduce(m1, policy);
  const OnPolicyModel r2 = on_policy_reduce(m2, policy);

  double max1 = -std::numeric_limits<double>::infinity(), min1 = -max1;
  double max2 = max1, min2 = min1;
  for (double r : r1.rewards) {
    max1 = std::max(max1, r);
    min1 = std::min(min1, r);
  }
  for (double r : r2.rewards) {
    max2 = std::max(max2, r);
    min2 = std::min(min2, r);
  }
  const double rbar = std::max({0.0, max1 - min2, max2 - min1});
  const double coef = m1.gamma * rbar / (1.0 - m1.gamma);

  std::vector<double> out(m1.n_states, 0.0);
  for (int s = 0; s < m1.n_states; ++s)
    out[s] = std::abs(r1.rewards[s] - r2.rewards[s]) +
             coef * tv_of_rows(r1.transitions.row(s), r2.transitions.row(s));
  return out;
}

std::string distance_matrix_to_csv(const DistanceMatrix& d) {
  std::string out = "s,s_prime,distance\n";
  char buf[64];
  for (std::size_t s = 0; s < d.values.rows(); ++s)
    for (std::size_t t = 0; t < d.values.cols(); ++t) {
      std::snprintf(buf, sizeof(buf), "%zu,%zu,%.17g\n", s, t, d.values(s, t));
      out += buf;
    }
  return out;
}

void write_distance_csv(const DistanceMatrix& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open for writing: " + path);
  out << distance_matrix_to_csv(d);
  if (!out) throw FormatError("write failed: " + path);
}

}  // namespace bisim
