#include "gbsm/approx.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gbsm/errors.hpp"
#include "gbsm/rng.hpp"

namespace bisim {

std::string AggregationMap::check_invariants() const {
  if (representatives.empty()) return "aggregation has no representatives";
  std::vector<char> is_rep(map.size(), 0);
  for (int u : representatives) {
    if (u < 0 || u >= static_cast<int>(map.size()))
      return "representative index out of range";
    is_rep[u] = 1;
  }
  for (int u : representatives)
    if (map[u] != u) return "a representative does not map to itself";
  for (std::size_t s = 0; s < map.size(); ++s) {
    if (map[s] < 0 || map[s] >= static_cast<int>(map.size()))
      return "map target out of range";
    if (!is_rep[map[s]]) return "map target is not a representative";
  }
  return {};
}

AggregationMap make_aggregation(int n_states, double fraction,
                                AggregationStrategy strategy, std::uint64_t seed,
                                bool random_representatives) {
  if (n_states <= 0) throw ParameterError("make_aggregation: n_states must be positive");
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw ParameterError("make_aggregation: fraction must be in (0, 1]");
  const int n_reps =
      std::min(n_states, static_cast<int>(std::ceil(fraction * n_states)));

  RandomStream rng(seed);
  AggregationMap agg;
  agg.representatives.resize(n_reps);
  if (random_representatives) {
    std::vector<int> idx(n_states);
    std::iota(idx.begin(), idx.end(), 0);
    for (int k = 0; k < n_reps; ++k) {
      const std::size_t j = k + rng.next_index(n_states - k);
      std::swap(idx[k], idx[j]);
    }
    std::copy(idx.begin(), idx.begin() + n_reps, agg.representatives.begin());
    std::sort(agg.representatives.begin(), agg.representatives.end());
  } else {
    std::iota(agg.representatives.begin(), agg.representatives.end(), 0);
  }

  agg.map.assign(n_states, -1);
  for (int u : agg.representatives) agg.map[u] = u;
  for (int s = 0; s < n_states; ++s) {
    if (agg.map[s] >= 0) continue;
    switch (strategy) {
      case AggregationStrategy::random:
        agg.map[s] = agg.representatives[rng.next_index(n_reps)];
        break;
      case AggregationStrategy::modulo:
        agg.map[s] = agg.representatives[s % n_reps];
        break;
    }
  }
  if (auto err = agg.check_invariants(); !err.empty())
    throw InternalError("make_aggregation produced an invalid map: " + err);
  return agg;
}

TabularMdp aggregate_mdp(const TabularMdp& m, const AggregationMap& agg) {
  if (agg.map.size() != static_cast<std::size_t>(m.n_states))
    throw ParameterError("aggregate_mdp: aggregation size does not match MDP");
  if (auto err = agg.check_invariants(); !err.empty())
    throw ParameterError("aggregate_mdp: " + err);

  TabularMdp out;
  out.n_states = m.n_states;
  out.n_actions = m.n_actions;
  out.gamma = m.gamma;
  out.rewards = Matrix(m.n_states, m.n_actions);
  out.transitions.assign(m.transitions.size(), 0.0);
  for (int s = 0; s < m.n_states; ++s) {
    const int rep = agg.map[s];
    for (int a = 0; a < m.n_actions; ++a) {
      out.rewards(s, a) = m.rewards(rep, a);
      auto src = m.transition_row(rep, a);
      auto dst = out.transition_row(s, a);
      for (int k = 0; k < m.n_states; ++k) dst[agg.map[k]] += src[k];
    }
  }
  out.ensure_valid();
  return out;
}

TabularMdp empirical_mdp(const TabularMdp& m, int k, std::uint64_t seed) {
  if (k < 1) throw ParameterError("empirical_mdp: k must be at least 1");
  TabularMdp out = m;
  std::vector<double> cumulative(m.n_states);
  std::vector<int> counts(m.n_states);
  for (int s = 0; s < m.n_states; ++s)
    for (int a = 0; a < m.n_actions; ++a) {
      RandomStream rng(seed ^ static_cast<std::uint64_t>(s * m.n_actions + a));
      auto row = m.transition_row(s, a);
      double acc = 0.0;
      for (int t = 0; t < m.n_states; ++t) {
        acc += row[t];
        cumulative[t] = acc;
      }
      std::fill(counts.begin(), counts.end(), 0);
      for (int draw = 0; draw < k; ++draw) {
        const double u = rng.next_double() * acc;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        int t = static_cast<int>(it - cumulative.begin());
        if (t >= m.n_states) t = m.n_states - 1;
        ++counts[t];
      }
      auto dst = out.transition_row(s, a);
      for (int t = 0; t < m.n_states; ++t)
        dst[t] = static_cast<double>(counts[t]) / static_cast<double>(k);
    }
  out.ensure_valid();
  return out;
}

TabularMdp gaussian_perturb_mdp(const TabularMdp& m, double stddev, std::uint64_t seed) {
  if (!(stddev >= 0.0))
    throw ParameterError("gaussian_perturb_mdp: stddev must be nonnegative");
  if (stddev == 0.0) return m;

  TabularMdp out = m;
  RandomStream rng(seed);
  for (int s = 0; s < m.n_states; ++s)
    for (int a = 0; a < m.n_actions; ++a) {
      auto row = out.transition_row(s, a);
      double total = 0.0;
      for (int t = 0; t < m.n_states; ++t) {
        row[t] = std::max(0.0, row[t] + stddev * rng.next_gaussian());
        total += row[t];
      }
      if (total == 0.0) {
        const double uniform = 1.0 / m.n_states;
        for (int t = 0; t < m.n_states; ++t) row[t] = uniform;
      } else {
        for (int t = 0; t < m.n_states; ++t) row[t] /= total;
      }
    }
  out.ensure_valid();
  return out;
}

}  // namespace bisim
