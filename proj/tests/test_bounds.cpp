#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gbsm/bounds.hpp"
#include "gbsm/errors.hpp"
#include "oracles.hpp"

using namespace bisim;

TEST_CASE("optimal state mapping trivial and scanned cases") {
  const auto m = garnet(6, 2, 0.5, 0.0, 1.0, 51, 0.7);
  const auto self = gbsm(m, m, 1e-8);
  CHECK(optimal_state_mapping(self) == std::vector<int>{0, 1, 2, 3, 4, 5});

  DistanceMatrix single;
  single.values = Matrix(1, 4, 0.5);
  CHECK(optimal_state_mapping(single) == std::vector<int>{0, 0, 0, 0});

  const auto m2 = garnet(6, 2, 0.5, 0.0, 1.0, 52, 0.7);
  const auto d = gbsm(m, m2, 1e-8);
  const auto f = optimal_state_mapping(d);
  for (int t = 0; t < 6; ++t)
    for (int s = 0; s < 6; ++s) CHECK(d.values(f[t], t) <= d.values(s, t));
}

TEST_CASE("transfer regret bound formula reductions") {
  // Constant rewards force a zero reward span, hence d == 0 with zero gap.
  const auto flat = garnet(5, 2, 0.5, 0.7, 0.7, 53, 0.5);
  const auto d_zero = gbsm(flat, flat, 1e-6);
  const std::vector<int> identity = {0, 1, 2, 3, 4};
  CHECK(transfer_regret_bound(d_zero, identity, 0.0, 0.5) == 0.0);
  CHECK(transfer_regret_bound(d_zero, identity, 0.25, 0.5) ==
        doctest::Approx((1.5 / 0.5) * 0.25).epsilon(1e-15));

  // Identical MDPs: the diagonal is numerically zero and the gap is at most
  // tol, so the bound collapses to (2/(1-gamma)) * tol.
  const double tol = 1e-6;
  const auto m = garnet(5, 2, 0.5, 0.0, 1.0, 53, 0.5);
  const auto d_self = gbsm(m, m, tol);
  CHECK(transfer_regret_bound(d_self, identity, 0.0, 0.5) <=
        2.0 / (1.0 - 0.5) * (tol + 1e-9));

  CHECK_THROWS_AS(transfer_regret_bound(d_self, identity, -1.0, 0.5), ParameterError);
  const std::vector<int> short_map = {0, 1};
  CHECK_THROWS_AS(transfer_regret_bound(d_self, short_map, 0.0, 0.5), ParameterError);
}

TEST_CASE("transfer regret bound dominates the ground truth on seeded pairs") {
  for (std::uint64_t seed : {60, 61, 62, 63, 64}) {
    const double gamma = 0.5, tol = 1e-5;
    const auto m1 = garnet(8, 3, 0.5, 0.0, 1.0, seed, gamma);
    const auto m2 = garnet(8, 3, 0.5, 0.0, 1.0, seed + 1000, gamma);
    const auto d = gbsm(m1, m2, tol);
    const auto f = optimal_state_mapping(d);
    const auto pi1 = greedy_policy(m1, optimal_values(m1, 1e-10));
    const double source_regret = ground_truth_regret(m1, pi1, 1e-10);
    const auto pi2 = transfer_policy(pi1, f, 8);
    for (int t = 0; t < 8; ++t)
      for (int a = 0; a < 3; ++a) CHECK(pi2.probs(t, a) == pi1.probs(f[t], a));
    const double truth = ground_truth_regret(m2, pi2, 1e-10);
    const double bound = transfer_regret_bound(d, f, source_regret, gamma);
    CHECK(truth <= bound + 1e-9);
  }
}

TEST_CASE("identical space transfer bound reductions and dominance") {
  const auto m = garnet(6, 2, 0.5, 0.0, 1.0, 65, 0.5);
  CHECK(identical_space_transfer_bound(m, m, 0.0) == 0.0);
  CHECK(identical_space_transfer_bound(m, m, 0.3) ==
        doctest::Approx(3.0 * 0.3).epsilon(1e-15));

  const double tol = 1e-6;
  const auto m2 = garnet(6, 2, 0.5, 0.0, 1.0, 66, 0.5);
  const auto d = gbsm(m, m2, tol);
  std::vector<int> identity(6);
  for (int i = 0; i < 6; ++i) identity[i] = i;
  const double tight = transfer_regret_bound(d, identity, 0.1, 0.5);
  const double loose = identical_space_transfer_bound(m, m2, 0.1);
  CHECK(loose >= tight - 2.0 / (1.0 - 0.5) * tol - 1e-12);
}

TEST_CASE("ground truth regret basics") {
  const auto m = garnet(7, 3, 0.5, 0.0, 1.0, 67, 0.8);
  const auto greedy = greedy_policy(m, optimal_values(m, 1e-9));
  CHECK(ground_truth_regret(m, greedy, 1e-9) <= 2e-9);

  // Two identical actions: any mixture is optimal.
  TabularMdp twin;
  twin.n_states = 1;
  twin.n_actions = 2;
  twin.gamma = 0.5;
  twin.rewards = Matrix(1, 2, 0.4);
  twin.transitions = {1.0, 1.0};
  CHECK(ground_truth_regret(twin, Policy::uniform(1, 2), 1e-10) <= 1e-9);

  const auto random_pi = Policy::uniform(7, 3);
  const auto v_star = oracles::optimal_values_long(m, 2000);
  const auto v_pi = oracles::policy_values_linear(m, random_pi);
  double expected = 0.0;
  for (int s = 0; s < 7; ++s) expected = std::max(expected, std::abs(v_star[s] - v_pi[s]));
  CHECK(ground_truth_regret(m, random_pi, 1e-9) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("lax action mapping matches an exhaustive scan") {
  const auto m1 = garnet(4, 3, 0.6, 0.0, 1.0, 70, 0.6);
  const auto m2 = garnet(5, 5, 0.6, 0.0, 1.0, 71, 0.6);
  const auto d = lax_gbsm(m1, m2, 1e-7);
  const auto f = optimal_state_mapping(d);
  const auto g = lax_action_mapping(m1, m2, f, d);

  for (int t = 0; t < 5; ++t)
    for (int a = 0; a < 3; ++a) {
      const int s = f[t];
      double best = 1e300;
      int best_b = 0;
      for (int b = 0; b < 5; ++b) {
        Distribution p{{m1.transition_row(s, a).begin(), m1.transition_row(s, a).end()}};
        Distribution q{{m2.transition_row(t, b).begin(), m2.transition_row(t, b).end()}};
        const double delta = std::abs(m1.rewards(s, a) - m2.rewards(t, b)) +
                             0.6 * wasserstein(p, q, d.values).value;
        if (delta < best) {
          best = delta;
          best_b = b;
        }
      }
      CHECK(g.at(t, a) == best_b);
    }
}

TEST_CASE("lax action mapping degenerate cases") {
  const auto m1 = garnet(4, 2, 0.5, 0.0, 1.0, 72, 0.5);
  const auto m2 = garnet(4, 1, 0.5, 0.0, 1.0, 73, 0.5);
  const auto d = lax_gbsm(m1, m2, 1e-7);
  const auto f = optimal_state_mapping(d);
  const auto g = lax_action_mapping(m1, m2, f, d);
  for (int t = 0; t < 4; ++t)
    for (int a = 0; a < 2; ++a) CHECK(g.at(t, a) == 0);

  // Identical MDPs with the identity mapping: when the diagonal delta is
  // the strict row minimum, g must pick the matching action.
  const auto m = garnet(4, 2, 0.5, 0.0, 1.0, 74, 0.5);
  const auto d_self = lax_gbsm(m, m, 1e-8);
  std::vector<int> identity = {0, 1, 2, 3};
  const auto g_self = lax_action_mapping(m, m, identity, d_self);
  for (int t = 0; t < 4; ++t)
    for (int a = 0; a < 2; ++a) {
      double diag_delta = 1e300, other = 1e300;
      for (int b = 0; b < 2; ++b) {
        Distribution p{{m.transition_row(t, a).begin(), m.transition_row(t, a).end()}};
        Distribution q{{m.transition_row(t, b).begin(), m.transition_row(t, b).end()}};
        const double delta = std::abs(m.rewards(t, a) - m.rewards(t, b)) +
                             0.5 * wasserstein(p, q, d_self.values).value;
        (b == a ? diag_delta : other) = delta;
      }
      if (diag_delta < other - 1e-12) CHECK(g_self.at(t, a) == a);
    }
}

TEST_CASE("sigma pair on trivial aggregations") {
  const double tol = 1e-7;
  const auto m = garnet(6, 2, 0.5, 0.0, 1.0, 80, 0.6);
  const auto identity = make_aggregation(6, 1.0, AggregationStrategy::modulo, 0);
  const auto sp = sigma_pair(m, aggregate_mdp(m, identity), identity, tol);
  CHECK(sp.sigma <= tol);
  CHECK(sp.sigma_tilde <= tol);

  const auto wrong = garnet(6, 2, 0.5, 0.0, 1.0, 81, 0.6);
  CHECK_THROWS_AS(sigma_pair(m, wrong, identity, tol), ParameterError);
}

TEST_CASE("sigma pair vanishes when every state is already bisimilar") {
  const double tol = 1e-7;
  const auto base = garnet(6, 2, 0.5, 0.0, 1.0, 87, 0.6);
  TabularMdp flat = base;
  for (int s = 0; s < 6; ++s)
    for (int a = 0; a < 2; ++a) {
      flat.rewards(s, a) = base.rewards(0, a);
      auto src = base.transition_row(0, a);
      auto dst = flat.transition_row(s, a);
      std::copy(src.begin(), src.end(), dst.begin());
    }
  const auto agg = make_aggregation(6, 0.5, AggregationStrategy::modulo, 0);
  const auto sp = sigma_pair(flat, aggregate_mdp(flat, agg), agg, tol);
  CHECK(sp.sigma <= tol);
  CHECK(sp.sigma_tilde <= tol);
}

TEST_CASE("sigma pair satisfies the aggregation inequality") {
  const double tol = 1e-6;
  const auto m = garnet(8, 2, 0.5, 0.0, 1.0, 9, 0.7);
  const auto agg = make_aggregation(8, 0.5, AggregationStrategy::modulo, 0);
  const auto sp = sigma_pair(m, aggregate_mdp(m, agg), agg, tol);
  CHECK(sp.sigma <= sp.sigma_tilde / (1.0 - 0.7) + 2 * tol);
  CHECK(sp.sigma >= 0.0);
  CHECK(sp.sigma_tilde >= 0.0);
}

TEST_CASE("aggregation bounds and their ordering") {
  CHECK(bsm_aggregation_bounds(0.0, 0.0, 0.7).ferns == 0.0);
  CHECK(bsm_aggregation_bounds(0.0, 0.0, 0.7).zhang == 0.0);
  const auto at_zero = bsm_aggregation_bounds(1.5, 1.5, 0.0);
  CHECK(at_zero.ferns == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(at_zero.zhang == doctest::Approx(3.0).epsilon(1e-15));

  const double tol = 1e-6, gamma = 0.6;
  const auto m1 = garnet(8, 2, 0.5, 0.0, 1.0, 82, gamma);
  const auto m2 = garnet(8, 2, 0.5, 0.0, 1.0, 83, gamma);
  const auto agg1 = make_aggregation(8, 0.5, AggregationStrategy::random, 84);
  const auto agg2 = make_aggregation(8, 0.5, AggregationStrategy::random, 85);
  const auto m1a = aggregate_mdp(m1, agg1);
  const auto m2a = aggregate_mdp(m2, agg2);

  const auto sp1 = sigma_pair(m1, m1a, agg1, tol);
  const auto sp2 = sigma_pair(m2, m2a, agg2, tol);
  const double gb = gbsm_aggregation_bound(sp1, sp2);

  const double truth =
      metric_approximation_error(gbsm(m1, m2, tol), gbsm(m1a, m2a, tol));
  CHECK(truth <= gb + tol + 1e-9);

  const auto baselines = bsm_aggregation_bounds(sp1.sigma_tilde + sp1.sigma_tilde_gap,
                                                sp2.sigma_tilde + sp2.sigma_tilde_gap,
                                                gamma);
  CHECK(gb <= baselines.zhang + sp1.sigma_gap + sp2.sigma_gap + 1e-9);
  CHECK(baselines.zhang <= baselines.ferns);

  // Single-MDP reduction: both pairs collapse to the same sigma.
  const double reduced = gbsm_aggregation_bound(sp1, sp1);
  CHECK(reduced == doctest::Approx(2.0 * (sp1.sigma + sp1.sigma_gap)).epsilon(1e-12));
}

TEST_CASE("identity aggregation makes the gbsm bound collapse") {
  const double tol = 1e-7;
  const auto m1 = garnet(6, 2, 0.5, 0.0, 1.0, 86, 0.5);
  const auto identity = make_aggregation(6, 1.0, AggregationStrategy::modulo, 0);
  const auto sp = sigma_pair(m1, aggregate_mdp(m1, identity), identity, tol);
  CHECK(gbsm_aggregation_bound(sp, sp) <= 4 * tol);
}

TEST_CASE("gbsm estimation bound degenerate and sampled cases") {
  const double tol = 1e-6;
  const auto m1 = garnet(6, 2, 0.5, 0.0, 1.0, 90, 0.6);
  const auto m2 = garnet(6, 2, 0.5, 0.0, 1.0, 91, 0.6);
  CHECK(gbsm_estimation_bound(m1, m1, m2, m2, tol) <= 4 * tol);

  // Dirac transition rows sample exactly for any K.
  const auto dirac = garnet(5, 2, 0.2, 0.0, 1.0, 92, 0.6);
  const auto dirac_hat = empirical_mdp(dirac, 17, 3);
  CHECK(gbsm_estimation_bound(dirac, dirac_hat, dirac, dirac_hat, tol) <= 4 * tol);

  const auto m1h = empirical_mdp(m1, 200, 7);
  const auto m2h = empirical_mdp(m2, 200, 8);
  const double truth =
      metric_approximation_error(gbsm(m1, m2, tol), gbsm(m1h, m2h, tol));
  CHECK(truth <= gbsm_estimation_bound(m1, m1h, m2, m2h, tol) + tol + 1e-9);

  const auto wrong_shape = garnet(5, 2, 0.5, 0.0, 1.0, 93, 0.6);
  CHECK_THROWS_AS(gbsm_estimation_bound(m1, wrong_shape, m2, m2, tol),
                  IncompatibilityError);
}

TEST_CASE("bsm estimation bound degenerate cases and tightness") {
  const double tol = 1e-6;
  const auto m = garnet(8, 2, 0.5, 0.0, 1.0, 94, 0.5);
  CHECK(bsm_estimation_bound(m, m, tol) <= 2 * tol + 1e-12);

  auto zero_gamma = m;
  zero_gamma.gamma = 0.0;
  CHECK(bsm_estimation_bound(zero_gamma, zero_gamma, tol) == 0.0);

  const auto noisy = gaussian_perturb_mdp(m, 0.2, 17);
  const auto d_cross = gbsm(m, noisy, tol);
  double diag = 0.0;
  for (int s = 0; s < 8; ++s) diag = std::max(diag, d_cross.values(s, s));
  CHECK(2.0 * diag <= bsm_estimation_bound(m, noisy, tol) + 4 * tol);
}

TEST_CASE("sample complexity closed form") {
  CHECK(sample_complexity(0.1, 0.05, 0.5, 1.0, 10) == 73778);
  CHECK(sample_complexity(0.5, 0.1, 0.3, 1.0, 4) == 36);
  CHECK(sample_complexity(0.5, 0.1, 0.0, 1.0, 4) == 0);
  CHECK(sample_complexity(0.5, 0.1, 0.3, 0.0, 4) == 0);
  CHECK_THROWS_AS(sample_complexity(0.0, 0.1, 0.3, 1.0, 4), ParameterError);
  CHECK_THROWS_AS(sample_complexity(0.5, 1.0, 0.3, 1.0, 4), ParameterError);
}

TEST_CASE("metric approximation error") {
  DistanceMatrix a, b;
  a.values = Matrix(3, 3, 1.0);
  b.values = Matrix(3, 3, 1.0);
  CHECK(metric_approximation_error(a, b) == 0.0);
  for (double& x : b.values.data()) x += 0.125;
  CHECK(metric_approximation_error(a, b) == doctest::Approx(0.125).epsilon(1e-15));

  RandomStream rng(5);
  for (double& x : a.values.data()) x = rng.next_double();
  for (double& x : b.values.data()) x = rng.next_double();
  double scan = 0.0;
  for (std::size_t i = 0; i < 9; ++i)
    scan = std::max(scan, std::abs(a.values.data()[i] - b.values.data()[i]));
  CHECK(metric_approximation_error(a, b) == scan);

  DistanceMatrix wrong;
  wrong.values = Matrix(2, 3, 0.0);
  CHECK_THROWS_AS(metric_approximation_error(a, wrong), ParameterError);
}
