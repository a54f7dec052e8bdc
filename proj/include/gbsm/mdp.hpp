#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gbsm/matrix.hpp"

namespace bisim {

/// Transition rows, policy rows and distributions must sum to 1 within this.
inline constexpr double kRowSumTolerance = 1e-12;

/// Finite tabular MDP: rewards R(s,a), row-stochastic transitions
/// P(s'|s,a) and a discount gamma in [0,1).
struct TabularMdp {
  int n_states = 0;
  int n_actions = 0;
  double gamma = 0.0;
  Matrix rewards;                   // n_states x n_actions
  std::vector<double> transitions;  // [s][a][s'] row-major

  std::span<const double> transition_row(int s, int a) const {
    return {transitions.data() + (static_cast<std::size_t>(s) * n_actions + a) * n_states,
            static_cast<std::size_t>(n_states)};
  }
  std::span<double> transition_row(int s, int a) {
    return {transitions.data() + (static_cast<std::size_t>(s) * n_actions + a) * n_states,
            static_cast<std::size_t>(n_states)};
  }

  double max_abs_reward() const;

  /// Empty string when all invariants hold, otherwise a description of the
  /// first violated one.
  std::string check_invariants() const;

  /// Throws InternalError when an invariant is broken. Constructors call
  /// this after building a model.
  void ensure_valid() const;

  bool operator==(const TabularMdp&) const = default;
};

/// Stochastic policy, one distribution over actions per state.
struct Policy {
  Matrix probs;  // n_states x n_actions

  static Policy uniform(int n_states, int n_actions);
  static Policy deterministic(const std::vector<int>& actions, int n_actions);

  std::string check_invariants() const;
  bool operator==(const Policy&) const = default;
};

using ValueVector = std::vector<double>;

/// Policy-averaged model: R_pi(s) and P_pi(s'|s).
struct OnPolicyModel {
  std::vector<double> rewards;  // n_states
  Matrix transitions;           // n_states x n_states
};

/// Random Garnet MDP. Every (s,a) row has exactly ceil(branching*n_states)
/// successors chosen uniformly without replacement; their masses are
/// uniform draws renormalized to 1. Rewards are i.i.d. uniform on
/// [reward_low, reward_high]. Identical inputs give bit-identical output,
/// and the draw sequence does not depend on gamma.
TabularMdp garnet(int n_states, int n_actions, double branching, double reward_low,
                  double reward_high, std::uint64_t seed, double gamma);

/// Optimal values by value iteration from V=0, run for the a-priori
/// iteration count of the gamma-contraction (sup-norm error at most tol).
ValueVector optimal_values(const TabularMdp& mdp, double tol);

/// V^pi by iterative policy evaluation with the same a-priori stopping rule.
ValueVector policy_values(const TabularMdp& mdp, const Policy& policy, double tol);

/// Deterministic policy selecting argmax_a { R(s,a) + gamma * P(.|s,a) . V },
/// ties broken toward the lowest action index.
Policy greedy_policy(const TabularMdp& mdp, const ValueVector& values);

/// Row s' of the result is row state_map[s'] of source_policy.
Policy transfer_policy(const Policy& source_policy, std::span<const int> state_map,
                       int target_n_states);

/// max over s in S1, s' in S2 and a of |R1(s,a) - R2(s',a)|. Requires equal
/// action counts and equal gamma.
double reward_span(const TabularMdp& m1, const TabularMdp& m2);

/// Policy-averaged rewards and transitions.
OnPolicyModel on_policy_reduce(const TabularMdp& mdp, const Policy& policy);

/// JSON serialization with lossless round-trip. load_mdp re-validates every
/// invariant and throws FormatError naming the violated one.
void save_mdp(const TabularMdp& mdp, const std::string& path);
TabularMdp load_mdp(const std::string& path);

std::string mdp_to_json(const TabularMdp& mdp);
TabularMdp mdp_from_json(const std::string& text);

}  // namespace bisim
