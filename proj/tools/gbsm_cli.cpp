// Command line front end: generate Garnet MDPs, compute bisimulation-style
// metrics between MDP files, run the seeded experiment campaigns and render
// their CSV tables as SVG charts.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gbsm/approx.hpp"
#include "gbsm/bounds.hpp"
#include "gbsm/errors.hpp"
#include "gbsm/experiments.hpp"
#include "gbsm/mdp.hpp"
#include "gbsm/metrics.hpp"

namespace {

std::vector<double> parse_gamma_range(const std::string& range) {
  double lo = 0, hi = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(range);
  if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':')
    throw bisim::ParameterError("--gammas expects lo:hi:step, e.g. 0.1:0.9:0.1");
  if (!(step > 0.0) || hi < lo)
    throw bisim::ParameterError("--gammas range is empty or has a nonpositive step");
  std::vector<double> gammas;
  const int count = static_cast<int>(std::floor((hi - lo) / step + 0.5)) + 1;
  for (int i = 0; i < count; ++i) {
    // Snap to a 1e-9 grid so 0.1 + 2 * 0.1 prints as 0.3.
    const double g = std::round((lo + i * step) * 1e9) / 1e9;
    gammas.push_back(g);
  }
  return gammas;
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw bisim::FormatError("cannot open for writing: " + path);
  out << text;
  if (!out) throw bisim::FormatError("write failed: " + path);
}

std::string gamma_label(double gamma) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", gamma);
  return buf;
}

void emit_campaign_outputs(const std::vector<bisim::BoundReport>& reports,
                           const std::string& out, const std::string& out_dir) {
  bisim::emit_csv(reports, out);
  if (out_dir.empty() || reports.empty()) return;
  std::vector<double> gammas;
  for (const auto& r : reports)
    if (gammas.empty() || std::abs(gammas.back() - r.gamma) > 1e-12)
      gammas.push_back(r.gamma);
  for (double g : gammas) {
    const std::string path =
        out_dir + "/" + reports[0].experiment + "_gamma_" + gamma_label(g) + ".svg";
    bisim::emit_svg_plot(reports, g, path);
  }
}

struct MetricArgs {
  std::string mdp1, mdp2;
  double tol = 1e-6;
  std::string out = "-";
};

struct CampaignArgs {
  int states = 20;
  int actions = 5;
  double branching = 0.5;
  std::string gammas = "0.1:0.9:0.1";
  double gamma = 0.0;  // single-gamma override when nonzero
  int trials = 100;
  double tol = 1e-4;
  std::uint64_t seed = 0;
  double noise_std = 0.0;  // fixed stddev override when nonzero
  double agg_fraction = 0.5;
  int samples = 200;
  std::string mode = "noise";
  std::string out = "campaign.csv";
  std::string out_dir;
};

void add_campaign_flags(CLI::App* cmd, CampaignArgs& args) {
  cmd->add_option("--states", args.states, "Number of states");
  cmd->add_option("--actions", args.actions, "Number of actions");
  cmd->add_option("--branching", args.branching, "Garnet branching factor in (0,1]");
  cmd->add_option("--gammas", args.gammas, "Discount grid lo:hi:step");
  cmd->add_option("--gamma", args.gamma, "Single discount factor (overrides --gammas)");
  cmd->add_option("--trials", args.trials, "Trials per discount factor");
  cmd->add_option("--tol", args.tol, "Metric iteration tolerance");
  cmd->add_option("--seed", args.seed, "Base seed for trial derivation");
  cmd->add_option("--out", args.out, "Output CSV path");
  cmd->add_option("--out-dir", args.out_dir, "Directory for per-gamma SVG charts");
}

bisim::ExperimentConfig to_config(const CampaignArgs& args) {
  bisim::ExperimentConfig cfg;
  cfg.n_states = args.states;
  cfg.n_actions = args.actions;
  cfg.branching = args.branching;
  cfg.gammas = args.gamma > 0.0 ? std::vector<double>{args.gamma}
                                : parse_gamma_range(args.gammas);
  cfg.trials = args.trials;
  cfg.tol = args.tol;
  cfg.base_seed = args.seed;
  cfg.agg_fraction = args.agg_fraction;
  cfg.sample_count = args.samples;
  if (args.mode == "noise")
    cfg.mode = bisim::EstimationMode::noise;
  else if (args.mode == "sample")
    cfg.mode = bisim::EstimationMode::sample;
  else
    throw bisim::ParameterError("--mode must be noise or sample");
  if (args.noise_std > 0.0) cfg.noise_std_lo = cfg.noise_std_hi = args.noise_std;
  return cfg;
}

int run(int argc, char** argv) {
  CLI::App app{"Bisimulation-style metrics between tabular MDPs"};
  app.require_subcommand(1);

  // garnet
  int g_states = 20, g_actions = 5;
  double g_branching = 0.5, g_gamma = 0.9;
  std::uint64_t g_seed = 0;
  std::string g_out = "-";
  auto* garnet_cmd = app.add_subcommand("garnet", "Generate a random Garnet MDP");
  garnet_cmd->add_option("--states", g_states, "Number of states");
  garnet_cmd->add_option("--actions", g_actions, "Number of actions");
  garnet_cmd->add_option("--branching", g_branching, "Branching factor in (0,1]");
  garnet_cmd->add_option("--gamma", g_gamma, "Discount factor in [0,1)");
  garnet_cmd->add_option("--seed", g_seed, "Generator seed");
  garnet_cmd->add_option("--out", g_out, "Output MDP path (- for stdout)");

  // metric subcommands
  MetricArgs gbsm_args, bsm_args, lax_args, onpolicy_args;
  auto* gbsm_cmd =
      app.add_subcommand("gbsm", "Metric between two MDPs sharing an action space");
  gbsm_cmd->add_option("mdp1", gbsm_args.mdp1, "First MDP file")->required();
  gbsm_cmd->add_option("mdp2", gbsm_args.mdp2, "Second MDP file")->required();
  gbsm_cmd->add_option("--tol", gbsm_args.tol, "Iteration tolerance");
  gbsm_cmd->add_option("--out", gbsm_args.out, "Output CSV path (- for stdout)");

  auto* bsm_cmd = app.add_subcommand("bsm", "Single-MDP bisimulation metric");
  bsm_cmd->add_option("mdp", bsm_args.mdp1, "MDP file")->required();
  bsm_cmd->add_option("--tol", bsm_args.tol, "Iteration tolerance");
  bsm_cmd->add_option("--out", bsm_args.out, "Output CSV path (- for stdout)");

  auto* lax_cmd =
      app.add_subcommand("lax", "Lax metric between MDPs with any action spaces");
  lax_cmd->add_option("mdp1", lax_args.mdp1, "First MDP file")->required();
  lax_cmd->add_option("mdp2", lax_args.mdp2, "Second MDP file")->required();
  lax_cmd->add_option("--tol", lax_args.tol, "Iteration tolerance");
  lax_cmd->add_option("--out", lax_args.out, "Output CSV path (- for stdout)");

  auto* onpolicy_cmd =
      app.add_subcommand("onpolicy", "On-policy metric under the uniform policy");
  onpolicy_cmd->add_option("mdp1", onpolicy_args.mdp1, "First MDP file")->required();
  onpolicy_cmd->add_option("mdp2", onpolicy_args.mdp2, "Second MDP file")->required();
  onpolicy_cmd->add_option("--tol", onpolicy_args.tol, "Iteration tolerance");
  onpolicy_cmd->add_option("--out", onpolicy_args.out, "Output CSV path (- for stdout)");

  // campaigns
  CampaignArgs transfer_args, agg_args, est_args;
  auto* transfer_cmd =
      app.add_subcommand("exp-transfer", "Policy transfer campaign (bound vs regret)");
  add_campaign_flags(transfer_cmd, transfer_args);

  auto* agg_cmd = app.add_subcommand("exp-aggregation",
                                     "State aggregation campaign (bound orderings)");
  add_campaign_flags(agg_cmd, agg_args);
  agg_cmd->add_option("--agg-fraction", agg_args.agg_fraction,
                      "Representative fraction in (0,1]");

  auto* est_cmd =
      app.add_subcommand("exp-estimation", "Estimation campaign (noise or sampling)");
  add_campaign_flags(est_cmd, est_args);
  est_cmd->add_option("--noise-std", est_args.noise_std,
                      "Fixed noise stddev (default: per-trial uniform in [0.1,0.3])");
  est_cmd->add_option("--samples", est_args.samples,
                      "Sample count per transition row in sample mode");
  est_cmd->add_option("--mode", est_args.mode, "noise or sample");

  // plot
  std::string plot_csv, plot_out, plot_out_dir;
  double plot_gamma = 0.0;
  auto* plot_cmd = app.add_subcommand("plot", "Render campaign CSV as SVG charts");
  plot_cmd->add_option("csv", plot_csv, "Campaign CSV file")->required();
  plot_cmd->add_option("--gamma", plot_gamma, "Discount factor to plot");
  plot_cmd->add_option("--out", plot_out, "Output SVG path (single gamma)");
  plot_cmd->add_option("--out-dir", plot_out_dir, "Directory for per-gamma SVGs");

  CLI11_PARSE(app, argc, argv);

  if (garnet_cmd->parsed()) {
    const auto m =
        bisim::garnet(g_states, g_actions, g_branching, 0.0, 1.0, g_seed, g_gamma);
    write_text(g_out, bisim::mdp_to_json(m) + "\n");
    return 0;
  }
  if (gbsm_cmd->parsed()) {
    const auto d = bisim::gbsm(bisim::load_mdp(gbsm_args.mdp1),
                               bisim::load_mdp(gbsm_args.mdp2), gbsm_args.tol);
    write_text(gbsm_args.out, bisim::distance_matrix_to_csv(d));
    return 0;
  }
  if (bsm_cmd->parsed()) {
    const auto d = bisim::bsm(bisim::load_mdp(bsm_args.mdp1), bsm_args.tol);
    write_text(bsm_args.out, bisim::distance_matrix_to_csv(d));
    return 0;
  }
  if (lax_cmd->parsed()) {
    const auto d = bisim::lax_gbsm(bisim::load_mdp(lax_args.mdp1),
                                   bisim::load_mdp(lax_args.mdp2), lax_args.tol);
    write_text(lax_args.out, bisim::distance_matrix_to_csv(d));
    return 0;
  }
  if (onpolicy_cmd->parsed()) {
    const auto m1 = bisim::load_mdp(onpolicy_args.mdp1);
    const auto m2 = bisim::load_mdp(onpolicy_args.mdp2);
    const auto pi = bisim::Policy::uniform(m1.n_states, m1.n_actions);
    const auto d = bisim::on_policy_gbsm(m1, m2, pi, onpolicy_args.tol);
    write_text(onpolicy_args.out, bisim::distance_matrix_to_csv(d));
    return 0;
  }
  if (transfer_cmd->parsed()) {
    emit_campaign_outputs(bisim::run_transfer_experiment(to_config(transfer_args)),
                          transfer_args.out, transfer_args.out_dir);
    return 0;
  }
  if (agg_cmd->parsed()) {
    emit_campaign_outputs(bisim::run_aggregation_experiment(to_config(agg_args)),
                          agg_args.out, agg_args.out_dir);
    return 0;
  }
  if (est_cmd->parsed()) {
    emit_campaign_outputs(bisim::run_estimation_experiment(to_config(est_args)),
                          est_args.out, est_args.out_dir);
    return 0;
  }
  if (plot_cmd->parsed()) {
    std::ifstream in(plot_csv);
    if (!in) throw bisim::FormatError("cannot open for reading: " + plot_csv);
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto reports = bisim::parse_csv(buf.str());
    if (!plot_out.empty()) {
      if (plot_gamma <= 0.0) throw bisim::ParameterError("plot --out requires --gamma");
      bisim::emit_svg_plot(reports, plot_gamma, plot_out);
      return 0;
    }
    if (plot_out_dir.empty())
      throw bisim::ParameterError("plot requires --out or --out-dir");
    std::vector<double> gammas;
    for (const auto& r : reports) {
      bool known = false;
      for (double g : gammas) known = known || std::abs(g - r.gamma) <= 1e-12;
      if (!known) gammas.push_back(r.gamma);
    }
    if (plot_gamma > 0.0) gammas = {plot_gamma};
    for (double g : gammas) {
      const std::string path = plot_out_dir + "/" +
                               (reports.empty() ? "plot" : reports[0].experiment) +
                               "_gamma_" + gamma_label(g) + ".svg";
      bisim::emit_svg_plot(reports, g, path);
    }
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const bisim::SoundnessError& e) {
    std::cerr << "soundness abort: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
