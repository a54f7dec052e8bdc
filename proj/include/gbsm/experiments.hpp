#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gbsm/bounds.hpp"

namespace bisim {

/// Seed derivation constants. Trial t draws MDP 1 from base_seed + t and
/// MDP 2 from base_seed + t + kTargetSeedOffset; derived constructions use
/// the offsets below, so campaigns are order- and parallelism-independent.
inline constexpr std::uint64_t kTargetSeedOffset = std::uint64_t{1} << 32;
inline constexpr std::uint64_t kApproxSeedOffset = std::uint64_t{1} << 33;
inline constexpr std::uint64_t kAggSeedOffset = std::uint64_t{1} << 34;
inline constexpr std::uint64_t kNoiseLevelSeedOffset = std::uint64_t{1} << 35;

enum class EstimationMode { noise, sample };

struct ExperimentConfig {
  std::vector<double> gammas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int trials = 100;
  int n_states = 20;
  int n_actions = 5;
  double branching = 0.5;
  double tol = 1e-4;
  std::uint64_t base_seed = 0;

  // Estimation campaign: per-trial noise stddev drawn uniform from
  // [noise_std_lo, noise_std_hi], or K-sample empirical models.
  double noise_std_lo = 0.1;
  double noise_std_hi = 0.3;
  EstimationMode mode = EstimationMode::noise;
  int sample_count = 200;

  // Aggregation campaign.
  double agg_fraction = 0.5;
  /// Reuse MDP 1 (and its aggregation) as MDP 2: the identical-pair
  /// degenerate mode and the single-MDP aggregation reduction.
  bool single_mdp = false;

  /// Accuracy of the value functions behind ground-truth regrets.
  double value_tol = 1e-10;
  /// Worker threads for trial-level parallelism; 0 picks the hardware count.
  int threads = 0;

  void validate() const;
};

/// Per (gamma, trial): Garnet source/target pair, GBSM, transfer of the
/// source-optimal greedy policy through the optimal state mapping, and the
/// transfer regret bound next to the exact ground-truth regret.
std::vector<BoundReport> run_transfer_experiment(const ExperimentConfig& cfg);

/// Per (gamma, trial): Garnet pair, per-MDP aggregations, the aggregation
/// error bound sigma_1 + sigma_2 and both single-MDP baselines next to the
/// exact metric approximation error.
std::vector<BoundReport> run_aggregation_experiment(const ExperimentConfig& cfg);

/// Per (gamma, trial): Garnet pair, perturbed or sampled counterparts, the
/// estimation error bound and the single-MDP Wasserstein baseline next to
/// the exact metric approximation error.
std::vector<BoundReport> run_estimation_experiment(const ExperimentConfig& cfg);

/// CSV table: experiment,gamma,trial,seed,ground_truth,<bound>...,<meta_*>...
/// Deterministic byte-for-byte: stable column order, 17-significant-digit
/// decimals.
std::string render_csv(std::span<const BoundReport> reports);
void emit_csv(std::span<const BoundReport> reports, const std::string& path);
std::vector<BoundReport> parse_csv(const std::string& text);

/// Static SVG chart for one gamma: x is the trial index, the ground truth
/// and every bound are separate series with a legend. meta_* columns are
/// not plotted.
std::string render_svg_plot(std::span<const BoundReport> reports, double gamma_filter);
void emit_svg_plot(std::span<const BoundReport> reports, double gamma_filter,
                   const std::string& path);

/// Monte-Carlo check of the Hoeffding sample complexity: repeated empirical
/// models at the prescribed K, counting per-entry deviations beyond the
/// per-entry budget and repeats whose TV-based error estimate exceeds eps.
struct HoeffdingMcConfig {
  int n_states = 4;
  int n_actions = 2;
  double branching = 0.5;
  double gamma = 0.3;
  double eps = 0.5;
  double alpha = 0.1;
  int repeats = 200;
  std::uint64_t base_seed = 0;
};

struct HoeffdingMcResult {
  std::int64_t k = 0;
  double rbar = 0.0;
  /// Fraction of (repeat, support entry) pairs deviating beyond the budget;
  /// each such event has probability at most alpha.
  double entry_failure_rate = 0.0;
  /// Fraction of repeats whose TV-based error estimate exceeds eps.
  double estimate_exceed_rate = 0.0;
};

HoeffdingMcResult hoeffding_mc(const HoeffdingMcConfig& cfg);

}  // namespace bisim
