// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exits nonzero if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "gbsm/bounds.hpp"
#include "gbsm/experiments.hpp"
#include "gbsm/metrics.hpp"
#include "oracles.hpp"

using namespace bisim;

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

int g_failures = 0;

void report(int index, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s %2d  %s (%s)\n", ok ? "PASS" : "FAIL", index, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

ExperimentConfig full_protocol() {
  ExperimentConfig cfg;
  cfg.gammas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  cfg.trials = 100;
  cfg.n_states = 20;
  cfg.n_actions = 5;
  cfg.branching = 0.5;
  cfg.tol = 1e-4;
  cfg.base_seed = 313;
  return cfg;
}

void criterion_transport_exactness() {
  Stopwatch watch;
  RandomStream rng(2025);
  double worst_value = 0.0, worst_gap = 0.0;
  bool ok = true;
  for (int trial = 0; trial < 500; ++trial) {
    const int m = 1 + static_cast<int>(rng.next_index(4));
    const int n = 1 + static_cast<int>(rng.next_index(4));
    const int support_p = 1 + static_cast<int>(rng.next_index(m));
    const int support_q = 1 + static_cast<int>(rng.next_index(n));
    const auto p = oracles::random_distribution(rng, m, support_p);
    const auto q = oracles::random_distribution(rng, n, support_q);
    const auto cost = oracles::random_cost(rng, m, n, 5.0);

    const auto result = wasserstein(p, q, cost);
    const double oracle = brute_force_wasserstein(p, q, cost);
    worst_value = std::max(worst_value, std::abs(result.value - oracle));

    const auto cert = dual_certificate(p, q, cost, result.plan);
    double dual_obj = 0.0;
    for (int i = 0; i < m; ++i) dual_obj += cert.mu[i] * p.mass[i];
    for (int j = 0; j < n; ++j) dual_obj -= cert.nu[j] * q.mass[j];
    double plan_cost = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) plan_cost += result.plan.plan(i, j) * cost(i, j);
    worst_gap = std::max(worst_gap, std::abs(plan_cost - dual_obj));
  }
  const double elapsed = watch.seconds();
  ok = worst_value <= 1e-9 && worst_gap <= 1e-8 && elapsed < 10.0;
  report(1, "transport exactness vs enumeration oracle", ok,
         fmt("500 instances, max value err %.2e, max gap %.2e, %.1f s", worst_value,
             worst_gap, elapsed));
}

void criterion_iteration_convergence() {
  const double tol = 1e-6;
  const double gammas[] = {0.3, 0.6, 0.9};
  bool monotone = true;
  double worst_tail = 0.0;
  for (int pair = 0; pair < 20; ++pair) {
    const double gamma = gammas[pair % 3];
    const int n_states = 6 + pair % 5;
    const auto m1 = garnet(n_states, 2, 0.5, 0.0, 1.0, 9000 + pair, gamma);
    const auto m2 = garnet(n_states, 2, 0.5, 0.0, 1.0, 9500 + pair, gamma);
    const int n_star = iteration_count(gamma, reward_span(m1, m2), tol).n_star;
    const auto iterates = gbsm_iterates(m1, m2, n_star + 10);
    for (std::size_t n = 1; n < iterates.size(); ++n)
      for (std::size_t i = 0; i < iterates[n].values.data().size(); ++i)
        if (iterates[n].values.data()[i] <
            iterates[n - 1].values.data()[i] - 1e-12)
          monotone = false;
    const auto& at_star = iterates[n_star - 1];
    const auto& beyond = iterates[n_star + 9];
    for (std::size_t i = 0; i < at_star.values.data().size(); ++i)
      worst_tail =
          std::max(worst_tail, beyond.values.data()[i] - at_star.values.data()[i]);
  }
  report(2, "iterates increase and settle within tol", monotone && worst_tail <= tol,
         fmt("20 pairs, max tail increment %.2e vs tol %.0e", worst_tail, tol));
}

void criterion_value_difference_bound() {
  const double tol = 1e-6;
  bool ok = true;
  double worst_slack = -1e300;
  for (int pair = 0; pair < 20; ++pair) {
    const double gamma = (pair % 2) ? 0.6 : 0.8;
    const int n1 = 5 + pair % 4, n2 = 5 + (pair / 2) % 4;
    const auto m1 = garnet(n1, 3, 0.5, 0.0, 1.0, 11000 + pair, gamma);
    const auto m2 = garnet(n2, 3, 0.5, 0.0, 1.0, 11500 + pair, gamma);
    const auto d = gbsm(m1, m2, tol);
    const auto v1 = optimal_values(m1, 1e-10);
    const auto v2 = optimal_values(m2, 1e-10);
    for (int s = 0; s < n1; ++s)
      for (int t = 0; t < n2; ++t) {
        const double violation =
            std::abs(v1[s] - v2[t]) - (d.values(s, t) + tol + 1e-8);
        worst_slack = std::max(worst_slack, violation);
        if (violation > 0.0) ok = false;
      }
  }
  report(3, "metric dominates optimal value differences", ok,
         fmt("20 pairs, worst margin %.2e", worst_slack));
}

void criterion_symmetry() {
  const double tol = 1e-6;
  double worst = 0.0;
  for (int pair = 0; pair < 20; ++pair) {
    const double gamma = (pair % 2) ? 0.5 : 0.7;
    const int n1 = 5 + pair % 4, n2 = 5 + (pair / 3) % 4;
    const auto m1 = garnet(n1, 2, 0.5, 0.0, 1.0, 12000 + pair, gamma);
    const auto m2 = garnet(n2, 2, 0.5, 0.0, 1.0, 12500 + pair, gamma);
    const auto fwd = gbsm(m1, m2, tol);
    const auto bwd = gbsm(m2, m1, tol);
    for (int s = 0; s < n1; ++s)
      for (int t = 0; t < n2; ++t)
        worst = std::max(worst, std::abs(fwd.values(s, t) - bwd.values(t, s)));
  }
  report(4, "direction reversal transposes the metric", worst <= 1e-9,
         fmt("20 pairs, max asymmetry %.2e", worst));
}

void criterion_triangle_inequality() {
  const double tol = 1e-6;
  double worst = -1e300;
  bool ok = true;
  for (int triple = 0; triple < 10; ++triple) {
    const double gamma = (triple % 2) ? 0.4 : 0.7;
    const int n1 = 5 + triple % 3, n2 = 5 + (triple / 2) % 3, n3 = 6 + triple % 2;
    const auto m1 = garnet(n1, 2, 0.5, 0.0, 1.0, 13000 + triple, gamma);
    const auto m2 = garnet(n2, 2, 0.5, 0.0, 1.0, 13500 + triple, gamma);
    const auto m3 = garnet(n3, 2, 0.5, 0.0, 1.0, 14000 + triple, gamma);
    const auto d12 = gbsm(m1, m2, tol);
    const auto d13 = gbsm(m1, m3, tol);
    const auto d32 = gbsm(m3, m2, tol);
    for (int s = 0; s < n1; ++s)
      for (int t = 0; t < n2; ++t)
        for (int mid = 0; mid < n3; ++mid) {
          const double violation =
              d12.values(s, t) -
              (d13.values(s, mid) + d32.values(mid, t) + 2 * tol + 1e-8);
          worst = std::max(worst, violation);
          if (violation > 0.0) ok = false;
        }
  }
  report(5, "triangle inequality across three MDPs", ok,
         fmt("10 triples, worst margin %.2e", worst));
}

void criterion_tv_relaxation() {
  const double tol = 1e-6;
  bool ok = true;
  double worst = -1e300;
  for (int pair = 0; pair < 20; ++pair) {
    const double gamma = (pair % 2) ? 0.5 : 0.8;
    const int n = 5 + pair % 5;
    const auto m1 = garnet(n, 2, 0.5, 0.0, 1.0, 15000 + pair, gamma);
    const auto m2 = garnet(n, 2, 0.5, 0.0, 1.0, 15500 + pair, gamma);
    const auto d = gbsm(m1, m2, tol);
    const auto tv = tv_upper_metric(m1, m2);
    double max_diag = 0.0, max_tv = 0.0;
    for (int s = 0; s < n; ++s) {
      max_diag = std::max(max_diag, d.values(s, s));
      max_tv = std::max(max_tv, tv[s]);
    }
    const double violation = max_diag - (max_tv / (1.0 - gamma) + 1e-8);
    worst = std::max(worst, violation);
    if (violation > 0.0) ok = false;
  }
  const auto m = garnet(8, 2, 0.5, 0.0, 1.0, 15999, 0.7);
  const auto self = gbsm(m, m, tol);
  for (int s = 0; s < 8; ++s)
    if (self.values(s, s) > tol) ok = false;
  report(6, "tv relaxation dominates shared-space diagonals", ok,
         fmt("20 pairs, worst margin %.2e", worst));
}

void criterion_transfer_campaign() {
  Stopwatch watch;
  ExperimentConfig cfg = full_protocol();
  cfg.threads = 1;  // single-threaded runtime target
  const auto reports = run_transfer_experiment(cfg);
  const double elapsed = watch.seconds();
  bool ok = reports.size() == 900;
  int sound = 0;
  for (const auto& r : reports)
    sound += (r.ground_truth <= r.bound("gbsm_transfer_bound"));
  ok = ok && sound == 900 && elapsed < 1800.0;
  report(7, "transfer campaign bound covers regret", ok,
         fmt("%0.f/900 rows sound, %.0f s single-threaded", double(sound), elapsed));
}

void criterion_aggregation_campaign() {
  Stopwatch watch;
  const auto reports = run_aggregation_experiment(full_protocol());
  bool ok = reports.size() == 900;
  int ordered = 0, eq18 = 0;
  for (const auto& r : reports) {
    const double gb = r.bound("gbsm_aggregation_bound");
    const double zhang = r.bound("bsm_zhang_bound");
    const double ferns = r.bound("bsm_ferns_bound");
    ordered += (r.ground_truth <= gb && gb <= zhang && zhang <= ferns);
    double sigma_1 = 0, sigma_2 = 0, st_1 = 0, st_2 = 0;
    for (const auto& [name, value] : r.metadata) {
      if (name == "sigma_1") sigma_1 = value;
      if (name == "sigma_2") sigma_2 = value;
      if (name == "sigma_tilde_1") st_1 = value;
      if (name == "sigma_tilde_2") st_2 = value;
    }
    eq18 += (sigma_1 <= st_1 / (1.0 - r.gamma) + 2 * r.tol &&
             sigma_2 <= st_2 / (1.0 - r.gamma) + 2 * r.tol);
  }
  ok = ok && ordered == 900 && eq18 == 900;

  // Single-MDP reduction: the bound column must equal exactly twice sigma_1.
  ExperimentConfig single = full_protocol();
  single.single_mdp = true;
  single.gammas = {0.3, 0.6, 0.9};
  single.trials = 5;
  single.n_states = 10;
  bool reduction = true;
  for (const auto& r : run_aggregation_experiment(single)) {
    double sigma_1 = 0;
    for (const auto& [name, value] : r.metadata)
      if (name == "sigma_1") sigma_1 = value;
    if (std::abs(r.bound("gbsm_aggregation_bound") - 2.0 * sigma_1) > 1e-9)
      reduction = false;
  }
  ok = ok && reduction;
  report(8, "aggregation campaign bound orderings", ok,
         fmt("%0.f/900 ordered, %0.f/900 sigma inequality, %.0f s", double(ordered),
             double(eq18), watch.seconds()));
}

void criterion_estimation_campaign() {
  Stopwatch watch;
  const auto reports = run_estimation_experiment(full_protocol());
  bool ok = reports.size() == 900;
  int ordered = 0;
  for (const auto& r : reports) {
    const double gb = r.bound("gbsm_estimation_bound");
    const double baseline = r.bound("bsm_estimation_bound");
    ordered += (r.ground_truth <= gb && gb <= baseline);
  }
  ok = ok && ordered == 900;
  report(9, "estimation campaign bound orderings", ok,
         fmt("%0.f/900 ordered, %.0f s", double(ordered), watch.seconds()));
}

void criterion_hoeffding_mc() {
  Stopwatch watch;
  bool ok = sample_complexity(0.5, 0.1, 0.3, 1.0, 4) == 36;
  HoeffdingMcConfig cfg;
  cfg.n_states = 4;
  cfg.n_actions = 2;
  cfg.branching = 0.5;
  cfg.gamma = 0.3;
  cfg.eps = 0.5;
  cfg.alpha = 0.1;
  cfg.repeats = 200;
  cfg.base_seed = 424242;
  const auto result = hoeffding_mc(cfg);
  const double elapsed = watch.seconds();
  ok = ok && result.entry_failure_rate <= 0.15 && result.estimate_exceed_rate <= 0.15 &&
       elapsed < 120.0;
  report(10, "sample complexity monte carlo", ok,
         fmt("entry failures %.3f, estimate exceed %.3f, K-check and %.1f s",
             result.entry_failure_rate, result.estimate_exceed_rate, elapsed));
}

void criterion_lax_and_on_policy() {
  const double tol = 1e-6;
  bool ok = true;
  double worst_lax = -1e300, worst_value = -1e300, worst_tv = -1e300;
  for (int pair = 0; pair < 10; ++pair) {
    const double gamma = (pair % 2) ? 0.5 : 0.7;
    const int n = 5 + pair % 4;
    const auto m1 = garnet(n, 3, 0.5, 0.0, 1.0, 16000 + pair, gamma);
    const auto m2 = garnet(n, 3, 0.5, 0.0, 1.0, 16500 + pair, gamma);

    const auto lax = lax_gbsm(m1, m2, tol);
    const auto plain = gbsm(m1, m2, tol);
    for (std::size_t i = 0; i < lax.values.data().size(); ++i) {
      const double violation =
          lax.values.data()[i] - (plain.values.data()[i] + 2 * tol);
      worst_lax = std::max(worst_lax, violation);
      if (violation > 0.0) ok = false;
    }

    const auto pi = Policy::uniform(n, 3);
    const auto d_pi = on_policy_gbsm(m1, m2, pi, tol);
    const auto v1 = policy_values(m1, pi, 1e-10);
    const auto v2 = policy_values(m2, pi, 1e-10);
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t) {
        const double violation =
            std::abs(v1[s] - v2[t]) - (d_pi.values(s, t) + tol + 1e-8);
        worst_value = std::max(worst_value, violation);
        if (violation > 0.0) ok = false;
      }

    const auto tv_pi = on_policy_tv_upper_metric(m1, m2, pi);
    double max_diag = 0.0, max_tv = 0.0;
    for (int s = 0; s < n; ++s) {
      max_diag = std::max(max_diag, d_pi.values(s, s));
      max_tv = std::max(max_tv, tv_pi[s]);
    }
    const double violation = max_diag - (max_tv / (1.0 - gamma) + 1e-8);
    worst_tv = std::max(worst_tv, violation);
    if (violation > 0.0) ok = false;
  }
  report(11, "lax and on-policy variants stay within their bounds", ok,
         fmt("margins: lax %.2e, value %.2e, tv %.2e", worst_lax, worst_value,
             worst_tv));
}

void criterion_determinism() {
  ExperimentConfig cfg;
  cfg.gammas = {0.3, 0.6};
  cfg.trials = 3;
  cfg.n_states = 8;
  cfg.n_actions = 2;
  cfg.tol = 1e-5;
  cfg.base_seed = 999;

  bool ok = true;
  {
    const auto a = run_transfer_experiment(cfg);
    const auto b = run_transfer_experiment(cfg);
    ok = ok && render_csv(a) == render_csv(b) &&
         render_svg_plot(a, 0.3) == render_svg_plot(b, 0.3);
  }
  {
    const auto a = run_aggregation_experiment(cfg);
    const auto b = run_aggregation_experiment(cfg);
    ok = ok && render_csv(a) == render_csv(b) &&
         render_svg_plot(a, 0.6) == render_svg_plot(b, 0.6);
  }
  {
    auto sampled = cfg;
    sampled.mode = EstimationMode::sample;
    sampled.sample_count = 120;
    const auto a = run_estimation_experiment(sampled);
    const auto b = run_estimation_experiment(sampled);
    ok = ok && render_csv(a) == render_csv(b) &&
         render_svg_plot(a, 0.3) == render_svg_plot(b, 0.3);
  }
  report(12, "campaign outputs are byte-identical across reruns", ok,
         "three campaign types, csv and svg");
}

}  // namespace

int main() {
  Stopwatch total;
  criterion_transport_exactness();
  criterion_iteration_convergence();
  criterion_value_difference_bound();
  criterion_symmetry();
  criterion_triangle_inequality();
  criterion_tv_relaxation();
  criterion_transfer_campaign();
  criterion_aggregation_campaign();
  criterion_estimation_campaign();
  criterion_hoeffding_mc();
  criterion_lax_and_on_policy();
  criterion_determinism();
  std::printf("%s: %d of 12 criteria failed, %.0f s total\n",
              g_failures == 0 ? "OK" : "FAILURES", g_failures, total.seconds());
  return g_failures == 0 ? 0 : 1;
}
