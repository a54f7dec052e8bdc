#include "gbsm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "gbsm/errors.hpp"
#include "gbsm/rng.hpp"

namespace bisim {

namespace {

constexpr double kSoundnessSlack = 1e-9;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void append_row_value(std::string& out, double x) {
  out += ',';
  out += format_double(x);
}

/// Runs fn(0..count-1) across a small thread pool; results must be written
/// into index-addressed slots so the merge order never depends on timing.
template <typename Fn>
void run_indexed(int count, int threads, Fn&& fn) {
  if (count <= 0) return;
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, count);
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

void check_sound(bool ok, const std::string& what, double gamma, std::uint64_t seed,
                 double lhs, double rhs) {
  if (ok) return;
  std::ostringstream oss;
  oss << what << " violated at gamma=" << gamma << ", trial seed=" << seed << " ("
      << lhs << " > " << rhs << ")";
  throw SoundnessError(oss.str());
}

}  // namespace

void ExperimentConfig::validate() const {
  if (gammas.empty()) throw ParameterError("config: gammas must be nonempty");
  for (double g : gammas)
    if (!(g > 0.0 && g < 1.0)) throw ParameterError("config: gammas must lie in (0, 1)");
  if (trials < 1) throw ParameterError("config: trials must be at least 1");
  if (n_states < 1 || n_actions < 1)
    throw ParameterError("config: state and action counts must be positive");
  if (!(branching > 0.0 && branching <= 1.0))
    throw ParameterError("config: branching must be in (0, 1]");
  if (!(tol > 0.0)) throw ParameterError("config: tol must be positive");
  if (!(value_tol > 0.0)) throw ParameterError("config: value_tol must be positive");
  if (!(noise_std_lo >= 0.0) || !(noise_std_hi >= noise_std_lo))
    throw ParameterError("config: noise stddev range is invalid");
  if (sample_count < 1) throw ParameterError("config: sample count must be at least 1");
  if (!(agg_fraction > 0.0 && agg_fraction <= 1.0))
    throw ParameterError("config: aggregation fraction must be in (0, 1]");
}

std::vector<BoundReport> run_transfer_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const int total = static_cast<int>(cfg.gammas.size()) * cfg.trials;
  std::vector<BoundReport> out(total);
  run_indexed(total, cfg.threads, [&](int task) {
    const int trial = task % cfg.trials;
    const double gamma = cfg.gammas[task / cfg.trials];
    const std::uint64_t seed1 = cfg.base_seed + static_cast<std::uint64_t>(trial);
    const std::uint64_t seed2 = seed1 + kTargetSeedOffset;

    const TabularMdp m1 =
        garnet(cfg.n_states, cfg.n_actions, cfg.branching, 0.0, 1.0, seed1, gamma);
    const TabularMdp m2 =
        cfg.single_mdp
            ? m1
            : garnet(cfg.n_states, cfg.n_actions, cfg.branching, 0.0, 1.0, seed2, gamma);

    const DistanceMatrix d = gbsm(m1, m2, cfg.tol);
    const std::vector<int> f = optimal_state_mapping(d);
    const Policy pi_source = greedy_policy(m1, optimal_values(m1, cfg.value_tol));
    const double source_regret = ground_truth_regret(m1, pi_source, cfg.value_tol);
    const Policy pi_target = transfer_policy(pi_source, f, m2.n_states);

    const double truth = ground_truth_regret(m2, pi_target, cfg.value_tol);
    const double bound = transfer_regret_bound(d, f, source_regret, gamma);
    check_sound(truth <= bound + kSoundnessSlack, "transfer regret bound", gamma, seed1,
                truth, bound);

    BoundReport r;
    r.experiment = "transfer";
    r.gamma = gamma;
    r.trial = trial;
    r.seed = seed1;
    r.ground_truth = truth;
    r.named_bounds = {{"gbsm_transfer_bound", bound}};
    r.tol = cfg.tol;
    r.metadata = {{"source_regret", source_regret}};
    out[task] = std::move(r);
  });
  return out;
}

std::vector<BoundReport> run_aggregation_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const int total = static_cast<int>(cfg.gammas.size()) * cfg.trials;
  std::vector<BoundReport> out(total);
  run_indexed(total, cfg.threads, [&](int task) {
    const int trial = task % cfg.trials;
    const double gamma = cfg.gammas[task / cfg.trials];
    const std::uint64_t seed1 = cfg.base_seed + static_cast<std::uint64_t>(trial);
    const std::uint64_t seed2 = seed1 + kTargetSeedOffset;

    const TabularMdp m1 =
        garnet(cfg.n_states, cfg.n_actions, cfg.branching, 0.0, 1.0, seed1, gamma);
    const TabularMdp m2 =
        cfg.single_mdp
            ? m1
            : garnet(cfg.n_states, cfg.n_actions, cfg.branching, 0.0, 1.0, seed2, gamma);

    const AggregationMap agg1 = make_aggregation(
        cfg.n_states, cfg.agg_fraction, AggregationStrategy::random,
        seed1 + kAggSeedOffset);
    const AggregationMap agg2 =
        cfg.single_mdp ? agg1
                       : make_aggregation(cfg.n_states, cfg.agg_fraction,
                                          AggregationStrategy::random,
                                          seed2 + kAggSeedOffset);
    const TabularMdp m1a = aggregate_mdp(m1, agg1);
    const TabularMdp m2a = cfg.single_mdp ? m1a : aggregate_mdp(m2, agg2);

    const DistanceMatrix d_orig = gbsm(m1, m2, cfg.tol);
    const DistanceMatrix d_agg = gbsm(m1a, m2a, cfg.tol);
    const double truth = metric_approximation_error(d_orig, d_agg);

    const SigmaPair s1 = sigma_pair(m1, m1a, agg1, cfg.tol);
    const SigmaPair s2 = cfg.single_mdp ? s1 : sigma_pair(m2, m2a, agg2, cfg.tol);
    const double gb = gbsm_aggregation_bound(s1, s2);

    const double st1 = s1.sigma_tilde + s1.sigma_tilde_gap;
    const double st2 = s2.sigma_tilde + s2.sigma_tilde_gap;
    const BsmAggregationBounds baselines = bsm_aggregation_bounds(st1, st2, gamma);

    check_sound(
        truth <= gb + std::max(d_orig.a_priori_gap, d_agg.a_priori_gap) + kSoundnessSlack,
        "aggregation error bound", gamma, seed1, truth, gb);
    check_sound(gb <= baselines.zhang + s1.sigma_gap + s2.sigma_gap + kSoundnessSlack,
                "aggregation baseline ordering", gamma, seed1, gb, baselines.zhang);
    check_sound(baselines.zhang <= baselines.ferns + kSoundnessSlack,
                "aggregation baseline ordering", gamma, seed1, baselines.zhang,
                baselines.ferns);
    for (const SigmaPair* sp : {&s1, &s2})
      check_sound(sp->sigma <= sp->sigma_tilde / (1.0 - gamma) +
                                   sp->sigma_tilde_gap / (1.0 - gamma) + kSoundnessSlack,
                  "aggregation sigma inequality", gamma, seed1, sp->sigma,
                  sp->sigma_tilde / (1.0 - gamma));

    BoundReport r;
    r.experiment = "aggregation";
    r.gamma = gamma;
    r.trial = trial;
    r.seed = seed1;
    r.ground_truth = truth;
    r.named_bounds = {{"gbsm_aggregation_bound", gb},
                      {"bsm_zhang_bound", baselines.zhang},
                      {"bsm_ferns_bound", baselines.ferns}};
    r.tol = cfg.tol;
    r.metadata = {{"sigma_1", s1.sigma + s1.sigma_gap},
                  {"sigma_2", s2.sigma + s2.sigma_gap},
                  {"sigma_tilde_1", st1},
                  {"sigma_tilde_2", st2}};
    out[task] = std::move(r);
  });
  return out;
}

std::vector<BoundReport> run_estimation_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const int total = static_cast<int>(cfg.gammas.size()) * cfg.trials;
  std::vector<BoundReport> out(total);
  run_indexed(total, cfg.threads, [&](int task) {
    const int trial = task % cfg.trials;
    const double gamma = cfg.gammas[task / cfg.trials];
    const std::uint64_t seed1 = cfg.base_seed + static_cast<std::uint64_t>(trial);
    const std::uint64_t seed2 = seed1 + kTargetSeedOffset;

    const TabularMdp m1 =
        garnet(cfg.n_states, cfg.n_actions, cfg.branching, 0.0, 1.0, seed1, gamma);
    const TabularMdp m2 =
        garnet(cfg.n_states, cfg.n_actions, cfg.branching, 0.0, 1.0, seed2, gamma);

    TabularMdp m1h, m2h;
    double noise_std = 0.0;
    if (cfg.mode == EstimationMode::noise) {
      RandomStream level(cfg.base_seed + static_cast<std::uint64_t>(trial) +
                         kNoiseLevelSeedOffset);
      noise_std =
          cfg.noise_std_lo + level.next_double() * (cfg.noise_std_hi - cfg.noise_std_lo);
      m1h = gaussian_perturb_mdp(m1, noise_std, seed1 + kApproxSeedOffset);
      m2h = gaussian_perturb_mdp(m2, noise_std, seed2 + kApproxSeedOffset);
    } else {
      m1h = empirical_mdp(m1, cfg.sample_count, seed1 + kApproxSeedOffset);
      m2h = empirical_mdp(m2, cfg.sample_count, seed2 + kApproxSeedOffset);
    }

    const DistanceMatrix d_orig = gbsm(m1, m2, cfg.tol);
    const DistanceMatrix d_hat = gbsm(m1h, m2h, cfg.tol);
    const double truth = metric_approximation_error(d_orig, d_hat);

    const double gb = gbsm_estimation_bound(m1, m1h, m2, m2h, cfg.tol);
    const double bsm_total =
        bsm_estimation_bound(m1, m1h, cfg.tol) + bsm_estimation_bound(m2, m2h, cfg.tol);

    check_sound(
        truth <= gb + std::max(d_orig.a_priori_gap, d_hat.a_priori_gap) + kSoundnessSlack,
        "estimation error bound", gamma, seed1, truth, gb);
    const double ordering_margin =
        4.0 * gamma / (1.0 - gamma) * cfg.tol + 4.0 * cfg.tol + kSoundnessSlack;
    check_sound(gb <= bsm_total + ordering_margin, "estimation baseline ordering", gamma,
                seed1, gb, bsm_total);

    BoundReport r;
    r.experiment = "estimation";
    r.gamma = gamma;
    r.trial = trial;
    r.seed = seed1;
    r.ground_truth = truth;
    r.named_bounds = {{"gbsm_estimation_bound", gb}, {"bsm_estimation_bound", bsm_total}};
    r.tol = cfg.tol;
    if (cfg.mode == EstimationMode::noise)
      r.metadata = {{"noise_std", noise_std}};
    else
      r.metadata = {{"sample_count", static_cast<double>(cfg.sample_count)}};
    out[task] = std::move(r);
  });
  return out;
}

std::string render_csv(std::span<const BoundReport> reports) {
  std::string out = "experiment,gamma,trial,seed,ground_truth";
  if (!reports.empty()) {
    for (const auto& [name, value] : reports[0].named_bounds) out += "," + name;
    out += ",meta_tol";
    for (const auto& [name, value] : reports[0].metadata) out += ",meta_" + name;
  }
  out += '\n';
  for (const BoundReport& r : reports) {
    const BoundReport& first = reports[0];
    if (r.named_bounds.size() != first.named_bounds.size() ||
        r.metadata.size() != first.metadata.size())
      throw InternalError("render_csv: inconsistent report schemas");
    for (std::size_t i = 0; i < r.named_bounds.size(); ++i)
      if (r.named_bounds[i].first != first.named_bounds[i].first)
        throw InternalError("render_csv: inconsistent bound names");
    for (std::size_t i = 0; i < r.metadata.size(); ++i)
      if (r.metadata[i].first != first.metadata[i].first)
        throw InternalError("render_csv: inconsistent metadata names");
    out += r.experiment;
    append_row_value(out, r.gamma);
    out += ',' + std::to_string(r.trial);
    out += ',' + std::to_string(r.seed);
    append_row_value(out, r.ground_truth);
    for (const auto& [name, value] : r.named_bounds) append_row_value(out, value);
    append_row_value(out, r.tol);
    for (const auto& [name, value] : r.metadata) append_row_value(out, value);
    out += '\n';
  }
  return out;
}

void emit_csv(std::span<const BoundReport> reports, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open for writing: " + path);
  out << render_csv(reports);
  if (!out) throw FormatError("write failed: " + path);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

}  // namespace

std::vector<BoundReport> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("CSV is empty");
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 5 || header[0] != "experiment" || header[1] != "gamma" ||
      header[2] != "trial" || header[3] != "seed" || header[4] != "ground_truth")
    throw FormatError("CSV header does not match the report schema");

  std::vector<BoundReport> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw FormatError("CSV row has a different arity than the header");
    BoundReport r;
    r.experiment = fields[0];
    r.gamma = std::stod(fields[1]);
    r.trial = std::stoi(fields[2]);
    r.seed = std::stoull(fields[3]);
    r.ground_truth = std::stod(fields[4]);
    for (std::size_t c = 5; c < header.size(); ++c) {
      const std::string& name = header[c];
      if (name == "meta_tol")
        r.tol = std::stod(fields[c]);
      else if (name.starts_with("meta_"))
        r.metadata.emplace_back(name.substr(5), std::stod(fields[c]));
      else
        r.named_bounds.emplace_back(name, std::stod(fields[c]));
    }
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

constexpr const char* kSeriesColors[] = {"#000000", "#1f77b4", "#d62728",
                                         "#2ca02c", "#ff7f0e", "#9467bd",
                                         "#8c564b", "#17becf"};

std::string format_coord(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

std::string format_tick(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

}  // namespace

std::string render_svg_plot(std::span<const BoundReport> reports, double gamma_filter) {
  std::vector<const BoundReport*> rows;
  for (const BoundReport& r : reports)
    if (std::abs(r.gamma - gamma_filter) <= 1e-12) rows.push_back(&r);
  if (!reports.empty() && rows.empty())
    throw ParameterError("render_svg_plot: no rows for the requested gamma");

  std::vector<std::string> series_names = {"ground_truth"};
  if (!rows.empty())
    for (const auto& [name, value] : rows[0]->named_bounds) series_names.push_back(name);

  const double width = 720, height = 420;
  const double left = 64, right = width - 196, top = 46, bottom = height - 46;

  double y_max = 0.0;
  for (const BoundReport* r : rows) {
    y_max = std::max(y_max, r->ground_truth);
    for (const auto& [name, value] : r->named_bounds) y_max = std::max(y_max, value);
  }
  if (y_max <= 0.0) y_max = 1.0;
  y_max *= 1.05;
  const int n_points = static_cast<int>(rows.size());

  const auto x_of = [&](int i) {
    if (n_points <= 1) return (left + right) / 2.0;
    return left + (right - left) * i / (n_points - 1);
  };
  const auto y_of = [&](double v) { return bottom - (bottom - top) * (v / y_max); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_coord(width) +
         "\" height=\"" + format_coord(height) + "\" viewBox=\"0 0 " +
         format_coord(width) + " " + format_coord(height) + "\">\n";
  svg += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const std::string title =
      (rows.empty() ? std::string("no data") : rows[0]->experiment) +
      " - gamma=" + format_tick(gamma_filter);
  svg += "  <text x=\"" + format_coord((left + right) / 2) +
         "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">" +
         title + "</text>\n";

  // Axes with ticks.
  svg += "  <g stroke=\"#222222\" stroke-width=\"1\">\n";
  svg += "    <line x1=\"" + format_coord(left) + "\" y1=\"" + format_coord(bottom) +
         "\" x2=\"" + format_coord(right) + "\" y2=\"" + format_coord(bottom) + "\"/>\n";
  svg += "    <line x1=\"" + format_coord(left) + "\" y1=\"" + format_coord(top) +
         "\" x2=\"" + format_coord(left) + "\" y2=\"" + format_coord(bottom) + "\"/>\n";
  svg += "  </g>\n";
  svg += "  <g font-family=\"sans-serif\" font-size=\"10\" fill=\"#222222\">\n";
  for (int tick = 0; tick <= 5; ++tick) {
    const double v = y_max * tick / 5.0;
    const double y = y_of(v);
    svg += "    <text x=\"" + format_coord(left - 6) + "\" y=\"" + format_coord(y + 3) +
           "\" text-anchor=\"end\">" + format_tick(v) + "</text>\n";
  }
  const int x_ticks = std::min(10, std::max(1, n_points));
  for (int tick = 0; tick < x_ticks; ++tick) {
    const int i = (x_ticks <= 1) ? 0 : tick * (n_points - 1) / (x_ticks - 1);
    svg += "    <text x=\"" + format_coord(x_of(i)) + "\" y=\"" +
           format_coord(bottom + 14) + "\" text-anchor=\"middle\">" + std::to_string(i) +
           "</text>\n";
  }
  svg += "    <text x=\"" + format_coord((left + right) / 2) + "\" y=\"" +
         format_coord(bottom + 30) + "\" text-anchor=\"middle\">trial</text>\n";
  svg += "  </g>\n";

  // Series.
  for (std::size_t si = 0; si < series_names.size(); ++si) {
    const char* color =
        kSeriesColors[si % (sizeof(kSeriesColors) / sizeof(kSeriesColors[0]))];
    std::string points;
    std::string circles;
    for (int i = 0; i < n_points; ++i) {
      const BoundReport* r = rows[i];
      const double v =
          (si == 0) ? r->ground_truth : r->bound(series_names[si]);
      const std::string x = format_coord(x_of(i));
      const std::string y = format_coord(y_of(v));
      points += x + "," + y + " ";
      circles += "    <circle cx=\"" + x + "\" cy=\"" + y + "\" r=\"2\" fill=\"" +
                 color + "\"/>\n";
    }
    if (n_points > 1)
      svg += "  <polyline fill=\"none\" stroke=\"" + std::string(color) +
             "\" stroke-width=\"1\" points=\"" + points + "\"/>\n";
    svg += "  <g class=\"series\">\n" + circles + "  </g>\n";
  }

  // Legend.
  svg += "  <g class=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (std::size_t si = 0; si < series_names.size(); ++si) {
    const char* color =
        kSeriesColors[si % (sizeof(kSeriesColors) / sizeof(kSeriesColors[0]))];
    const double y = top + 8 + 16.0 * si;
    svg += "    <rect x=\"" + format_coord(right + 12) + "\" y=\"" + format_coord(y - 8) +
           "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/>\n";
    svg += "    <text x=\"" + format_coord(right + 26) + "\" y=\"" + format_coord(y + 1) +
           "\">" + series_names[si] + "</text>\n";
  }
  svg += "  </g>\n";
  svg += "</svg>\n";
  return svg;
}

void emit_svg_plot(std::span<const BoundReport> reports, double gamma_filter,
                   const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open for writing: " + path);
  out << render_svg_plot(reports, gamma_filter);
  if (!out) throw FormatError("write failed: " + path);
}

HoeffdingMcResult hoeffding_mc(const HoeffdingMcConfig& cfg) {
  if (cfg.repeats < 1) throw ParameterError("hoeffding_mc: repeats must be at least 1");
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0))
    throw ParameterError("hoeffding_mc: gamma must be in (0, 1)");

  const TabularMdp m1 = garnet(cfg.n_states, cfg.n_actions, cfg.branching, 0.0, 1.0,
                               cfg.base_seed, cfg.gamma);
  const TabularMdp m2 = garnet(cfg.n_states, cfg.n_actions, cfg.branching, 0.0, 1.0,
                               cfg.base_seed + kTargetSeedOffset, cfg.gamma);
  const double rbar = reward_span(m1, m2);
  if (!(rbar > 0.0)) throw ParameterError("hoeffding_mc: reward span degenerated to 0");

  HoeffdingMcResult result;
  result.rbar = rbar;
  result.k = sample_complexity(cfg.eps, cfg.alpha, cfg.gamma, rbar, cfg.n_states);
  if (result.k < 1) throw ParameterError("hoeffding_mc: sample complexity is below 1");

  const double one_minus = 1.0 - cfg.gamma;
  // Per-entry deviation budget ensuring the TV-based estimate stays below eps.
  const double delta =
      cfg.eps * one_minus * one_minus / (cfg.gamma * rbar * cfg.n_states);
  const double coef = cfg.gamma * rbar / (one_minus * one_minus);

  std::int64_t entry_failures = 0, entry_total = 0;
  int exceed = 0;
  for (int rep = 0; rep < cfg.repeats; ++rep) {
    const std::uint64_t rep_seed =
        cfg.base_seed + kApproxSeedOffset + static_cast<std::uint64_t>(rep);
    const TabularMdp m1h = empirical_mdp(m1, static_cast<int>(result.k), rep_seed);
    const TabularMdp m2h =
        empirical_mdp(m2, static_cast<int>(result.k), rep_seed + kTargetSeedOffset);

    const auto max_tv_and_count = [&](const TabularMdp& original,
                                      const TabularMdp& estimate) {
      double max_tv = 0.0;
      for (int s = 0; s < original.n_states; ++s)
        for (int a = 0; a < original.n_actions; ++a) {
          auto row = original.transition_row(s, a);
          auto hat = estimate.transition_row(s, a);
          double l1 = 0.0;
          for (int t = 0; t < original.n_states; ++t) {
            l1 += std::abs(row[t] - hat[t]);
            if (row[t] > 0.0) {
              ++entry_total;
              if (std::abs(row[t] - hat[t]) > delta) ++entry_failures;
            }
          }
          max_tv = std::max(max_tv, 0.5 * l1);
        }
      return max_tv;
    };
    const double max_tv1 = max_tv_and_count(m1, m1h);
    const double max_tv2 = max_tv_and_count(m2, m2h);
    if (coef * (max_tv1 + max_tv2) > cfg.eps) ++exceed;
  }
  result.entry_failure_rate =
      static_cast<double>(entry_failures) / static_cast<double>(entry_total);
  result.estimate_exceed_rate =
      static_cast<double>(exceed) / static_cast<double>(cfg.repeats);
  return result;
}

}  // namespace bisim
