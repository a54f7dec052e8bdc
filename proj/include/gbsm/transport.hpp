#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gbsm/matrix.hpp"

namespace bisim {

/// Distribution masses must sum to 1 within this.
inline constexpr double kProbabilityTolerance = 1e-12;

/// Probability vector over a finite support.
struct Distribution {
  std::vector<double> mass;

  std::string check_invariants() const;
  bool operator==(const Distribution&) const = default;
};

/// Ground cost d(s_i, s_j); entries must be nonnegative and finite.
using CostMatrix = Matrix;

/// Transportation plan with its prescribed marginals. Zero-mass support
/// points stay in the plan (rows/columns of zeros) so indices line up with
/// state indices.
struct CouplingPlan {
  Matrix plan;
  Distribution row_marginal;
  Distribution col_marginal;
};

/// Kantorovich dual variables: mu_i - nu_j <= cost(i, j) for all i, j.
struct DualCertificate {
  std::vector<double> mu;
  std::vector<double> nu;
};

/// Centralized numeric tolerances for the transport solver.
struct TransportTolerances {
  double primal_feasibility = 1e-9;
  double duality_gap = 1e-8;
  /// Charnes-style supply perturbation resolving degenerate bases.
  double supply_perturbation = 1e-13;
  /// Relative threshold below which a reduced cost counts as nonnegative.
  double reduced_cost = 1e-12;
};

/// Half the L1 distance between two probability vectors; result in [0, 1].
double total_variation(const Distribution& p, const Distribution& q);

struct WassersteinResult {
  double value = 0.0;
  CouplingPlan plan;
};

/// Exact 1-Wasserstein distance between discrete distributions under the
/// given ground cost, with an optimal transportation plan. Solved by a
/// transportation-specialized network simplex.
WassersteinResult wasserstein(const Distribution& p, const Distribution& q,
                              const CostMatrix& cost,
                              const TransportTolerances& tols = {});

/// Dual optimum (mu, nu) certifying the given plan: the duality gap against
/// the plan's cost is at most tols.duality_gap, and every dual constraint
/// holds within tols.primal_feasibility. Throws ParameterError when the
/// plan is not optimal within tolerance.
DualCertificate dual_certificate(const Distribution& p, const Distribution& q,
                                 const CostMatrix& cost, const CouplingPlan& plan,
                                 const TransportTolerances& tols = {});

/// Three-way coupling lambda[i][k][j] built from plans (P1,P3) and (P3,P2),
/// with lambda13 and lambda32 recovered as its marginals.
struct GluedCoupling {
  std::size_t dim1 = 0, dim_mid = 0, dim2 = 0;
  std::vector<double> values;  // [i][k][j] row-major

  double operator()(std::size_t i, std::size_t k, std::size_t j) const {
    return values[(i * dim_mid + k) * dim2 + j];
  }
};

GluedCoupling glue_couplings(const CouplingPlan& lambda13, const CouplingPlan& lambda32,
                             const TransportTolerances& tols = {});

/// Exact optimum by exhaustive enumeration of the transportation polytope's
/// basic feasible solutions. Test oracle only: refuses supports larger than
/// four points.
double brute_force_wasserstein(const Distribution& p, const Distribution& q,
                               const CostMatrix& cost);

namespace detail {

/// Spanning-tree basis of a transportation solve, reusable as a warm start
/// for the next solve over the same supports.
using TransportBasis = std::vector<std::pair<int, int>>;

/// Reusable scratch for many small transportation solves. Not thread-safe;
/// use one workspace per thread.
class TransportWorkspace {
 public:
  /// Minimum transport cost between compacted marginals. rows/cols give the
  /// support indices into `cost`; row_mass/col_mass the (positive) masses.
  /// When warm_basis is non-null and holds a basis of the right size it
  /// seeds the solve and receives the final basis.
  double min_cost_value(std::span<const int> rows, std::span<const double> row_mass,
                        std::span<const int> cols, std::span<const double> col_mass,
                        const Matrix& cost, const TransportTolerances& tols,
                        TransportBasis* warm_basis = nullptr);

  /// As above for already-gathered dense cost data (m x n row-major).
  double solve_dense(int m, int n, const double* cost, const double* supply,
                     const double* demand, const TransportTolerances& tols,
                     TransportBasis* warm_basis = nullptr);

  /// Basis arcs of the last solve: (row, col, flow) with flows clipped at 0.
  struct Arc {
    int row, col;
    double flow;
  };
  std::span<const Arc> arcs() const { return {arcs_.data(), arcs_.size()}; }
  std::span<const double> row_potentials() const { return {u_.data(), u_.size()}; }
  std::span<const double> col_potentials() const { return {v_.data(), v_.size()}; }

 private:
  void least_cost_initial_basis(int m, int n, const double* cost);
  void rebuild_adjacency(int m, int n);
  void compute_potentials(int m, int n, const double* cost);
  void set_flows_from_tree(int m, int n, const double* supply, const double* demand,
                           bool clip);

  std::vector<double> cost_buf_, supply_, demand_, gathered_demand_;
  std::vector<Arc> arcs_;
  std::vector<double> u_, v_;
  std::vector<int> head_, next_arc_, degree_, order_, parent_node_, parent_arc_;
  std::vector<double> balance_;
  std::vector<char> seen_, dead_, row_alive_, col_alive_;
};

}  // namespace detail

}  // namespace bisim
