// Test-only reference implementations. Everything here stays independent of
// the library's solver paths: dense linear algebra, exhaustive enumeration
// and long-horizon iteration only.
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "gbsm/matrix.hpp"
#include "gbsm/mdp.hpp"
#include "gbsm/rng.hpp"
#include "gbsm/transport.hpp"

namespace oracles {

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> solve_dense_linear(bisim::Matrix a, std::vector<double> b) {
  const int n = static_cast<int>(a.rows());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (std::abs(a(pivot, col)) < 1e-14)
      throw std::runtime_error("oracle linear solve: singular matrix");
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(a(pivot, c), a(col, c));
      std::swap(b[pivot], b[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double factor = a(r, col) / a(col, col);
      if (factor == 0.0) continue;
      for (int c = col; c < n; ++c) a(r, c) -= factor * a(col, c);
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int c = r + 1; c < n; ++c) acc -= a(r, c) * x[c];
    x[r] = acc / a(r, r);
  }
  return x;
}

/// Exact V^pi from the linear system (I - gamma P_pi) V = R_pi.
inline std::vector<double> policy_values_linear(const bisim::TabularMdp& m,
                                                const bisim::Policy& pi) {
  const auto reduced = bisim::on_policy_reduce(m, pi);
  bisim::Matrix a(m.n_states, m.n_states, 0.0);
  for (int r = 0; r < m.n_states; ++r) {
    for (int c = 0; c < m.n_states; ++c) a(r, c) = -m.gamma * reduced.transitions(r, c);
    a(r, r) += 1.0;
  }
  return solve_dense_linear(std::move(a), reduced.rewards);
}

/// Long-horizon value iteration, run for `steps` sweeps.
inline std::vector<double> optimal_values_long(const bisim::TabularMdp& m, int steps) {
  std::vector<double> v(m.n_states, 0.0), next(m.n_states, 0.0);
  for (int it = 0; it < steps; ++it) {
    for (int s = 0; s < m.n_states; ++s) {
      double best = -1e300;
      for (int a = 0; a < m.n_actions; ++a) {
        auto row = m.transition_row(s, a);
        double q = m.rewards(s, a);
        for (int k = 0; k < m.n_states; ++k) q += m.gamma * row[k] * v[k];
        best = std::max(best, q);
      }
      next[s] = best;
    }
    v.swap(next);
  }
  return v;
}

/// Independent GBSM iteration backed by the brute-force transport oracle.
/// Only usable when every transition row has at most four successors.
inline bisim::Matrix gbsm_via_bruteforce(const bisim::TabularMdp& m1,
                                        const bisim::TabularMdp& m2, double tol) {
  double rbar = 0.0;
  for (int s = 0; s < m1.n_states; ++s)
    for (int t = 0; t < m2.n_states; ++t)
      for (int a = 0; a < m1.n_actions; ++a)
        rbar = std::max(rbar, std::abs(m1.rewards(s, a) - m2.rewards(t, a)));

  int n = 0;
  if (rbar > 0.0 && m1.gamma > 0.0) {
    while (std::pow(m1.gamma, n) * rbar / (1.0 - m1.gamma) > tol) ++n;
  } else if (rbar > 0.0) {
    n = 1;
  }

  bisim::Matrix prev(m1.n_states, m2.n_states, 0.0);
  bisim::Matrix next(m1.n_states, m2.n_states, 0.0);
  for (int it = 0; it < n; ++it) {
    for (int s = 0; s < m1.n_states; ++s)
      for (int t = 0; t < m2.n_states; ++t) {
        double best = 0.0;
        for (int a = 0; a < m1.n_actions; ++a) {
          bisim::Distribution p{{m1.transition_row(s, a).begin(),
                                m1.transition_row(s, a).end()}};
          bisim::Distribution q{{m2.transition_row(t, a).begin(),
                                m2.transition_row(t, a).end()}};
          const double w = bisim::brute_force_wasserstein(p, q, prev);
          best = std::max(best,
                          std::abs(m1.rewards(s, a) - m2.rewards(t, a)) + m1.gamma * w);
        }
        next(s, t) = best;
      }
    std::swap(prev, next);
  }
  return prev;
}

/// Uniform random distribution over n points with a given support size.
inline bisim::Distribution random_distribution(bisim::RandomStream& rng, int n,
                                              int support) {
  bisim::Distribution d;
  d.mass.assign(n, 0.0);
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int k = 0; k < support; ++k) {
    const std::size_t j = k + rng.next_index(n - k);
    std::swap(idx[k], idx[j]);
  }
  double total = 0.0;
  for (int k = 0; k < support; ++k) {
    d.mass[idx[k]] = rng.next_double_open();
    total += d.mass[idx[k]];
  }
  for (double& x : d.mass) x /= total;
  return d;
}

inline bisim::CostMatrix random_cost(bisim::RandomStream& rng, int m, int n,
                                    double scale) {
  bisim::CostMatrix c(m, n);
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) c(i, j) = scale * rng.next_double();
  return c;
}

}  // namespace oracles
