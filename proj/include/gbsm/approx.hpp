#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gbsm/mdp.hpp"

namespace bisim {

enum class AggregationStrategy { random, modulo };

/// Representative state set U and the mapping [.] : S -> U. Map entries are
/// representative state indices; representatives map to themselves.
struct AggregationMap {
  std::vector<int> representatives;
  std::vector<int> map;

  std::string check_invariants() const;
  bool operator==(const AggregationMap&) const = default;
};

/// Representatives are the first ceil(fraction * n_states) state indices
/// (or a seeded random subset when random_representatives is set).
/// Non-representatives are assigned one uniformly at random (seeded) or by
/// index modulo |U|. Deterministic given its inputs.
AggregationMap make_aggregation(int n_states, double fraction,
                                AggregationStrategy strategy, std::uint64_t seed,
                                bool random_representatives = false);

/// Same state space; every state takes its representative's reward row and
/// transition row, with transition mass collapsed onto representatives.
TabularMdp aggregate_mdp(const TabularMdp& m, const AggregationMap& agg);

/// Empirical transition model: each row is replaced by the frequency
/// distribution of k i.i.d. successor draws. The (s,a) stream is seeded as
/// seed XOR (s * n_actions + a), so rows are independent of iteration order.
TabularMdp empirical_mdp(const TabularMdp& m, int k, std::uint64_t seed);

/// Adds i.i.d. zero-mean Gaussian noise to every transition entry, clips
/// negatives to zero and renormalizes each row; a row clipped to all zeros
/// becomes uniform. stddev of zero returns the input unchanged.
TabularMdp gaussian_perturb_mdp(const TabularMdp& m, double stddev, std::uint64_t seed);

}  // namespace bisim
