#include "gbsm/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "gbsm/errors.hpp"
#include "gbsm/rng.hpp"
#include "gbsm/schedule.hpp"

namespace bisim {

namespace {

std::string check_probability_row(std::span<const double> row, const std::string& what) {
  double sum = 0.0;
  for (double x : row) {
    if (!std::isfinite(x)) return what + " has a non-finite entry";
    if (x < 0.0) return what + " has a negative entry";
    sum += x;
  }
  if (std::abs(sum - 1.0) > kRowSumTolerance) {
    std::ostringstream oss;
    oss << what << " sums to " << sum << " (must be 1 within 1e-12)";
    return oss.str();
  }
  return {};
}

}  // namespace

double TabularMdp::max_abs_reward() const {
  double m = 0.0;
  for (double r : rewards.data()) m = std::max(m, std::abs(r));
  return m;
}

std::string TabularMdp::check_invariants() const {
  if (n_states <= 0) return "n_states must be positive";
  if (n_actions <= 0) return "n_actions must be positive";
  if (!(gamma >= 0.0 && gamma < 1.0)) return "gamma must be in [0, 1)";
  if (rewards.rows() != static_cast<std::size_t>(n_states) ||
      rewards.cols() != static_cast<std::size_t>(n_actions))
    return "rewards shape does not match n_states x n_actions";
  if (transitions.size() !=
      static_cast<std::size_t>(n_states) * n_actions * n_states)
    return "transitions shape does not match n_states x n_actions x n_states";
  for (double r : rewards.data())
    if (!std::isfinite(r)) return "rewards must be finite";
  for (int s = 0; s < n_states; ++s)
    for (int a = 0; a < n_actions; ++a) {
      std::ostringstream what;
      what << "transition row (s=" << s << ", a=" << a << ")";
      if (auto err = check_probability_row(transition_row(s, a), what.str());
          !err.empty())
        return err;
    }
  return {};
}

void TabularMdp::ensure_valid() const {
  if (auto err = check_invariants(); !err.empty())
    throw InternalError("TabularMdp invariant violated: " + err);
}

Policy Policy::uniform(int n_states, int n_actions) {
  Policy p{Matrix(n_states, n_actions, 1.0 / n_actions)};
  return p;
}

Policy Policy::deterministic(const std::vector<int>& actions, int n_actions) {
  Policy p{Matrix(actions.size(), n_actions, 0.0)};
  for (std::size_t s = 0; s < actions.size(); ++s) {
    if (actions[s] < 0 || actions[s] >= n_actions)
      throw ParameterError("deterministic policy: action index out of range");
    p.probs(s, actions[s]) = 1.0;
  }
  return p;
}

std::string Policy::check_invariants() const {
  for (std::size_t s = 0; s < probs.rows(); ++s) {
    std::ostringstream what;
    what << "policy row (s=" << s << ")";
    if (auto err = check_probability_row(probs.row(s), what.str()); !err.empty())
      return err;
  }
  return {};
}

TabularMdp garnet(int n_states, int n_actions, double branching, double reward_low,
                  double reward_high, std::uint64_t seed, double gamma) {
  if (n_states <= 0 || n_actions <= 0)
    throw ParameterError("garnet: n_states and n_actions must be positive");
  if (!(branching > 0.0 && branching <= 1.0))
    throw ParameterError("garnet: branching must be in (0, 1]");
  if (reward_low > reward_high)
    throw ParameterError("garnet: reward_low must not exceed reward_high");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw ParameterError("garnet: gamma must be in [0, 1)");

  const int n_branch =
      std::min(n_states, static_cast<int>(std::ceil(branching * n_states)));

  TabularMdp m;
  m.n_states = n_states;
  m.n_actions = n_actions;
  m.gamma = gamma;
  m.rewards = Matrix(n_states, n_actions);
  m.transitions.assign(
      static_cast<std::size_t>(n_states) * n_actions * n_states, 0.0);

  RandomStream rng(seed);
  std::vector<int> idx(n_states);
  std::vector<double> mass(n_branch);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      // Partial Fisher-Yates: the first n_branch entries are a uniform
      // subset without replacement.
      std::iota(idx.begin(), idx.end(), 0);
      for (int k = 0; k < n_branch; ++k) {
        const std::size_t j = k + rng.next_index(n_states - k);
        std::swap(idx[k], idx[j]);
      }
      std::sort(idx.begin(), idx.begin() + n_branch);

      double total = 0.0;
      do {
        total = 0.0;
        for (int k = 0; k < n_branch; ++k) {
          mass[k] = rng.next_double();
          total += mass[k];
        }
      } while (total == 0.0);

      auto row = m.transition_row(s, a);
      for (int k = 0; k < n_branch; ++k) row[idx[k]] = mass[k] / total;

      m.rewards(s, a) = reward_low + rng.next_double() * (reward_high - reward_low);
    }
  }
  m.ensure_valid();
  return m;
}

ValueVector optimal_values(const TabularMdp& mdp, double tol) {
  if (!(tol > 0.0)) throw ParameterError("optimal_values: tol must be positive");
  const int n = iteration_count(mdp.gamma, mdp.max_abs_reward(), tol).n_star;

  ValueVector v(mdp.n_states, 0.0), next(mdp.n_states, 0.0);
  for (int it = 0; it < n; ++it) {
    for (int s = 0; s < mdp.n_states; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < mdp.n_actions; ++a) {
        auto row = mdp.transition_row(s, a);
        double q = mdp.rewards(s, a);
        double ev = 0.0;
        for (int k = 0; k < mdp.n_states; ++k) ev += row[k] * v[k];
        q += mdp.gamma * ev;
        if (q > best) best = q;
      }
      next[s] = best;
    }
    v.swap(next);
  }
  return v;
}

ValueVector policy_values(const TabularMdp& mdp, const Policy& policy, double tol) {
  if (!(tol > 0.0)) throw ParameterError("policy_values: tol must be positive");
  const auto reduced = on_policy_reduce(mdp, policy);

  double rspan = 0.0;
  for (double r : reduced.rewards) rspan = std::max(rspan, std::abs(r));
  const int n = iteration_count(mdp.gamma, rspan, tol).n_star;

  ValueVector v(mdp.n_states, 0.0), next(mdp.n_states, 0.0);
  for (int it = 0; it < n; ++it) {
    for (int s = 0; s < mdp.n_states; ++s) {
      auto row = reduced.transitions.row(s);
      double ev = 0.0;
      for (int k = 0; k < mdp.n_states; ++k) ev += row[k] * v[k];
      next[s] = reduced.rewards[s] + mdp.gamma * ev;
    }
    v.swap(next);
  }
  return v;
}

Policy greedy_policy(const TabularMdp& mdp, const ValueVector& values) {
  if (values.size() != static_cast<std::size_t>(mdp.n_states))
    throw ParameterError("greedy_policy: value vector length mismatch");
  std::vector<int> actions(mdp.n_states, 0);
  for (int s = 0; s < mdp.n_states; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < mdp.n_actions; ++a) {
      auto row = mdp.transition_row(s, a);
      double q = mdp.rewards(s, a);
      double ev = 0.0;
      for (int k = 0; k < mdp.n_states; ++k) ev += row[k] * values[k];
      q += mdp.gamma * ev;
      if (q > best) {  // strict: ties stay at the lowest index
        best = q;
        actions[s] = a;
      }
    }
  }
  return Policy::deterministic(actions, mdp.n_actions);
}

Policy transfer_policy(const Policy& source_policy, std::span<const int> state_map,
                       int target_n_states) {
  if (target_n_states <= 0)
    throw ParameterError("transfer_policy: target_n_states must be positive");
  if (state_map.size() != static_cast<std::size_t>(target_n_states))
    throw ParameterError("transfer_policy: state map length must equal target_n_states");
  const int n_source = static_cast<int>(source_policy.probs.rows());
  const int n_actions = static_cast<int>(source_policy.probs.cols());
  Policy out{Matrix(target_n_states, n_actions)};
  for (int s = 0; s < target_n_states; ++s) {
    const int src = state_map[s];
    if (src < 0 || src >= n_source)
      throw ParameterError("transfer_policy: state map entry out of range");
    auto from = source_policy.probs.row(src);
    auto to = out.probs.row(s);
    std::copy(from.begin(), from.end(), to.begin());
  }
  return out;
}

double reward_span(const TabularMdp& m1, const TabularMdp& m2) {
  if (m1.n_actions != m2.n_actions)
    throw IncompatibilityError("reward_span: action counts differ");
  if (m1.gamma != m2.gamma)
    throw IncompatibilityError("reward_span: discount factors differ");
  double span = 0.0;
  for (int a = 0; a < m1.n_actions; ++a) {
    double max1 = -std::numeric_limits<double>::infinity();
    double min1 = std::numeric_limits<double>::infinity();
    double max2 = max1, min2 = min1;
    for (int s = 0; s < m1.n_states; ++s) {
      max1 = std::max(max1, m1.rewards(s, a));
      min1 = std::min(min1, m1.rewards(s, a));
    }
    for (int s = 0; s < m2.n_states; ++s) {
      max2 = std::max(max2, m2.rewards(s, a));
      min2 = std::min(min2, m2.rewards(s, a));
    }
    span = std::max({span, max1 - min2, max2 - min1});
  }
  return std::max(span, 0.0);
}

OnPolicyModel on_policy_reduce(const TabularMdp& mdp, const Policy& policy) {
  if (policy.probs.rows() != static_cast<std::size_t>(mdp.n_states) ||
      policy.probs.cols() != static_cast<std::size_t>(mdp.n_actions))
    throw ParameterError("on_policy_reduce: policy shape does not match MDP");
  OnPolicyModel out;
  out.rewards.assign(mdp.n_states, 0.0);
  out.transitions = Matrix(mdp.n_states, mdp.n_states);
  for (int s = 0; s < mdp.n_states; ++s) {
    auto trow = out.transitions.row(s);
    for (int a = 0; a < mdp.n_actions; ++a) {
      const double w = policy.probs(s, a);
      if (w == 0.0) continue;
      out.rewards[s] += w * mdp.rewards(s, a);
      auto prow = mdp.transition_row(s, a);
      for (int k = 0; k < mdp.n_states; ++k) trow[k] += w * prow[k];
    }
  }
  return out;
}

std::string mdp_to_json(const TabularMdp& mdp) {
  nlohmann::json j;
  j["n_states"] = mdp.n_states;
  j["n_actions"] = mdp.n_actions;
  j["gamma"] = mdp.gamma;
  auto rewards = nlohmann::json::array();
  for (int s = 0; s < mdp.n_states; ++s) {
    auto row = nlohmann::json::array();
    for (int a = 0; a < mdp.n_actions; ++a) row.push_back(mdp.rewards(s, a));
    rewards.push_back(std::move(row));
  }
  j["rewards"] = std::move(rewards);
  auto transitions = nlohmann::json::array();
  for (int s = 0; s < mdp.n_states; ++s) {
    auto per_state = nlohmann::json::array();
    for (int a = 0; a < mdp.n_actions; ++a) {
      auto row = nlohmann::json::array();
      for (double x : mdp.transition_row(s, a)) row.push_back(x);
      per_state.push_back(std::move(row));
    }
    transitions.push_back(std::move(per_state));
  }
  j["transitions"] = std::move(transitions);
  return j.dump(2);
}

TabularMdp mdp_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("MDP file is not valid JSON: ") + e.what());
  }
  TabularMdp m;
  try {
    m.n_states = j.at("n_states").get<int>();
    m.n_actions = j.at("n_actions").get<int>();
    m.gamma = j.at("gamma").get<double>();
    const auto& rewards = j.at("rewards");
    const auto& transitions = j.at("transitions");
    if (m.n_states <= 0 || m.n_actions <= 0)
      throw FormatError("MDP file invalid: n_states and n_actions must be positive");
    m.rewards = Matrix(m.n_states, m.n_actions);
    if (rewards.size() != static_cast<std::size_t>(m.n_states))
      throw FormatError("MDP file invalid: rewards has wrong number of rows");
    for (int s = 0; s < m.n_states; ++s) {
      if (rewards[s].size() != static_cast<std::size_t>(m.n_actions))
        throw FormatError("MDP file invalid: rewards row has wrong length");
      for (int a = 0; a < m.n_actions; ++a) m.rewards(s, a) = rewards[s][a].get<double>();
    }
    m.transitions.assign(
        static_cast<std::size_t>(m.n_states) * m.n_actions * m.n_states, 0.0);
    if (transitions.size() != static_cast<std::size_t>(m.n_states))
      throw FormatError("MDP file invalid: transitions has wrong number of states");
    for (int s = 0; s < m.n_states; ++s) {
      if (transitions[s].size() != static_cast<std::size_t>(m.n_actions))
        throw FormatError("MDP file invalid: transitions state block has wrong length");
      for (int a = 0; a < m.n_actions; ++a) {
        if (transitions[s][a].size() != static_cast<std::size_t>(m.n_states))
          throw FormatError("MDP file invalid: transition row has wrong length");
        auto row = m.transition_row(s, a);
        for (int k = 0; k < m.n_states; ++k) row[k] = transitions[s][a][k].get<double>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("MDP file invalid: ") + e.what());
  }
  if (auto err = m.check_invariants(); !err.empty())
    throw FormatError("MDP file invalid: " + err);
  return m;
}

void save_mdp(const TabularMdp& mdp, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open for writing: " + path);
  out << mdp_to_json(mdp) << '\n';
  if (!out) throw FormatError("write failed: " + path);
}

TabularMdp load_mdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return mdp_from_json(buf.str());
}

}  // namespace bisim
