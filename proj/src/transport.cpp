#include "gbsm/transport.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "gbsm/errors.hpp"

namespace bisim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_distribution(const Distribution& d, const char* name) {
  if (auto err = d.check_invariants(); !err.empty())
    throw ParameterError(std::string(name) + ": " + err);
}

void require_cost(const CostMatrix& cost, std::size_t rows, std::size_t cols) {
  if (cost.rows() != rows || cost.cols() != cols)
    throw ParameterError("cost matrix dimensions do not match the supports");
  for (double c : cost.data())
    if (!(c >= 0.0) || !std::isfinite(c))
      throw ParameterError("cost matrix entries must be nonnegative and finite");
}

struct Support {
  std::vector<int> idx;
  std::vector<double> mass;
};

Support compact(const Distribution& d) {
  Support s;
  for (std::size_t i = 0; i < d.mass.size(); ++i)
    if (d.mass[i] > 0.0) {
      s.idx.push_back(static_cast<int>(i));
      s.mass.push_back(d.mass[i]);
    }
  return s;
}

}  // namespace

std::string Distribution::check_invariants() const {
  if (mass.empty()) return "distribution has empty support";
  double sum = 0.0;
  for (double x : mass) {
    if (!std::isfinite(x)) return "distribution has a non-finite entry";
    if (x < 0.0) return "distribution has a negative entry";
    sum += x;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    std::ostringstream oss;
    oss << "distribution sums to " << sum << " (must be 1 within 1e-12)";
    return oss.str();
  }
  return {};
}

double total_variation(const Distribution& p, const Distribution& q) {
  if (p.mass.size() != q.mass.size())
    throw ParameterError("total_variation: support sizes differ");
  require_distribution(p, "total_variation: p");
  require_distribution(q, "total_variation: q");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.mass.size(); ++i)
    sum += std::abs(p.mass[i] - q.mass[i]);
  return std::clamp(0.5 * sum, 0.0, 1.0);
}

namespace detail {

// Least-cost crossing-out rule on the perturbed masses. Each allocation
// exhausts exactly one live row or column, so the m+n-1 chosen cells form a
// spanning tree of the bipartite graph.
void TransportWorkspace::least_cost_initial_basis(int m, int n, const double* cost) {
  arcs_.clear();
  row_alive_.assign(m, 1);
  col_alive_.assign(n, 1);
  balance_.resize(m + n);
  for (int i = 0; i < m; ++i) balance_[i] = supply_[i];
  for (int j = 0; j < n; ++j) balance_[m + j] = demand_[j];
  int rows_left = m;
  const int basis = m + n - 1;
  for (int k = 0; k < basis; ++k) {
    int bi = -1, bj = -1;
    double best = kInf;
    for (int i = 0; i < m; ++i) {
      if (!row_alive_[i]) continue;
      const double* crow = cost + static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j)
        if (col_alive_[j] && crow[j] < best) {
          best = crow[j];
          bi = i;
          bj = j;
        }
    }
    const double rs = balance_[bi], rd = balance_[m + bj];
    const double x = std::min(rs, rd);
    arcs_.push_back({bi, bj, x});
    const bool kill_row = (rs < rd) || (rs == rd && rows_left > 1);
    if (kill_row) {
      row_alive_[bi] = 0;
      --rows_left;
      balance_[m + bj] = rd - x;
    } else {
      col_alive_[bj] = 0;
      balance_[bi] = rs - x;
    }
  }
}

void TransportWorkspace::rebuild_adjacency(int m, int n) {
  head_.assign(m + n, -1);
  next_arc_.resize(2 * arcs_.size());
  for (int e = 0; e < static_cast<int>(arcs_.size()); ++e) {
    const int a = arcs_[e].row;
    const int b = m + arcs_[e].col;
    next_arc_[2 * e] = head_[a];
    head_[a] = 2 * e;
    next_arc_[2 * e + 1] = head_[b];
    head_[b] = 2 * e + 1;
  }
}

void TransportWorkspace::compute_potentials(int m, int n, const double* cost) {
  const int nodes = m + n;
  u_.resize(m);
  v_.resize(n);
  parent_node_.resize(nodes);
  parent_arc_.resize(nodes);
  seen_.assign(nodes, 0);
  order_.clear();
  order_.push_back(0);
  seen_[0] = 1;
  u_[0] = 0.0;
  parent_node_[0] = -1;
  parent_arc_[0] = -1;
  for (std::size_t qi = 0; qi < order_.size(); ++qi) {
    const int x = order_[qi];
    for (int slot = head_[x]; slot != -1; slot = next_arc_[slot]) {
      const int e = slot >> 1;
      const int other = (slot & 1) ? arcs_[e].row : m + arcs_[e].col;
      if (seen_[other]) continue;
      seen_[other] = 1;
      parent_node_[other] = x;
      parent_arc_[other] = e;
      const double c = cost[arcs_[e].row * n + arcs_[e].col];
      if (other >= m)
        v_[other - m] = c - u_[arcs_[e].row];
      else
        u_[other] = c - v_[arcs_[e].col];
      order_.push_back(other);
    }
  }
  if (order_.size() != static_cast<std::size_t>(nodes))
    throw InternalError("transport basis lost connectivity");
}

// Tree flows by leaf elimination. Assumes current adjacency.
void TransportWorkspace::set_flows_from_tree(int m, int n, const double* supply,
                                             const double* demand, bool clip) {
  const int nodes = m + n;
  balance_.resize(nodes);
  for (int i = 0; i < m; ++i) balance_[i] = supply[i];
  for (int j = 0; j < n; ++j) balance_[m + j] = demand[j];
  degree_.assign(nodes, 0);
  for (const Arc& a : arcs_) {
    ++degree_[a.row];
    ++degree_[m + a.col];
  }
  dead_.assign(arcs_.size(), 0);
  order_.clear();
  for (int x = 0; x < nodes; ++x)
    if (degree_[x] == 1) order_.push_back(x);
  for (std::size_t qi = 0; qi < order_.size(); ++qi) {
    const int x = order_[qi];
    if (degree_[x] != 1) continue;  // became the final root
    int found = -1;
    for (int slot = head_[x]; slot != -1; slot = next_arc_[slot]) {
      const int e = slot >> 1;
      if (!dead_[e]) {
        found = e;
        break;
      }
    }
    if (found < 0) throw InternalError("transport basis leaf lost its arc");
    const int other = (x >= m) ? arcs_[found].row : m + arcs_[found].col;
    arcs_[found].flow = balance_[x];
    dead_[found] = 1;
    balance_[other] -= balance_[x];
    balance_[x] = 0.0;
    --degree_[x];
    if (--degree_[other] == 1) order_.push_back(other);
  }
  if (clip)
    for (Arc& a : arcs_) a.flow = std::max(a.flow, 0.0);
}

double TransportWorkspace::solve_dense(int m, int n, const double* cost,
                                       const double* supply, const double* demand,
                                       const TransportTolerances& tols,
                                       TransportBasis* warm_basis) {
  const int nodes = m + n;
  supply_.assign(supply, supply + m);
  demand_.assign(demand, demand + n);
  // Charnes perturbation: every supply strictly positive, matched by the
  // last demand, so initial and pivot bases stay nondegenerate.
  const double eps = tols.supply_perturbation;
  for (int i = 0; i < m; ++i) supply_[i] += eps;
  demand_[n - 1] += m * eps;

  const bool warm =
      warm_basis && warm_basis->size() == static_cast<std::size_t>(nodes - 1);
  if (warm) {
    arcs_.clear();
    for (const auto& [row, col] : *warm_basis) arcs_.push_back({row, col, 0.0});
    rebuild_adjacency(m, n);
    set_flows_from_tree(m, n, supply_.data(), demand_.data(), /*clip=*/false);
  } else {
    least_cost_initial_basis(m, n, cost);
  }

  double max_cost = 0.0;
  for (int k = 0; k < m * n; ++k) max_cost = std::max(max_cost, cost[k]);
  const double opt_tol = tols.reduced_cost * (1.0 + max_cost);

  const int max_pivots = 200 * (nodes + 1);
  int pivot = 0;
  for (; pivot < max_pivots; ++pivot) {
    rebuild_adjacency(m, n);
    compute_potentials(m, n, cost);

    int bi = -1, bj = -1;
    double best = -opt_tol;
    for (int i = 0; i < m; ++i) {
      const double ui = u_[i];
      const double* crow = cost + static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j) {
        const double r = crow[j] - ui - v_[j];
        if (r < best) {
          best = r;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi < 0) break;

    // Unique tree cycle closed by the entering arc (bi, bj): walk both
    // endpoints to their meeting node. Odd-position arcs on each branch
    // lose theta, even-position arcs gain it.
    seen_.assign(nodes, 0);
    for (int x = bi; x != -1; x = parent_node_[x]) seen_[x] = 1;
    int meet = m + bj;
    while (!seen_[meet]) meet = parent_node_[meet];

    double theta = kInf;
    int leave = -1;
    auto scan_branch = [&](int from) {
      int t = 0;
      for (int x = from; x != meet; x = parent_node_[x]) {
        ++t;
        const int e = parent_arc_[x];
        if ((t & 1) && arcs_[e].flow < theta) {
          theta = arcs_[e].flow;
          leave = e;
        }
      }
    };
    scan_branch(bi);
    scan_branch(m + bj);
    if (leave < 0) throw InternalError("transport pivot found no leaving arc");

    auto apply_branch = [&](int from) {
      int t = 0;
      for (int x = from; x != meet; x = parent_node_[x]) {
        ++t;
        arcs_[parent_arc_[x]].flow += (t & 1) ? -theta : theta;
      }
    };
    apply_branch(bi);
    apply_branch(m + bj);
    arcs_[leave] = {bi, bj, theta};
  }
  if (pivot >= max_pivots)
    throw InternalError("transportation simplex exceeded its pivot budget");

  // Drop the perturbation: re-solve the final tree against the original
  // masses, then price the clipped flows.
  set_flows_from_tree(m, n, supply, demand, /*clip=*/true);
  double value = 0.0;
  for (const Arc& a : arcs_) value += a.flow * cost[a.row * n + a.col];

  if (warm_basis) {
    warm_basis->clear();
    for (const Arc& a : arcs_) warm_basis->emplace_back(a.row, a.col);
  }
  return value;
}

double TransportWorkspace::min_cost_value(std::span<const int> rows,
                                          std::span<const double> row_mass,
                                          std::span<const int> cols,
                                          std::span<const double> col_mass,
                                          const Matrix& cost,
                                          const TransportTolerances& tols,
                                          TransportBasis* warm_basis) {
  const int m = static_cast<int>(rows.size());
  const int n = static_cast<int>(cols.size());
  cost_buf_.resize(static_cast<std::size_t>(m) * n);
  for (int i = 0; i < m; ++i) {
    auto crow = cost.row(rows[i]);
    double* out = cost_buf_.data() + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) out[j] = crow[cols[j]];
  }
  // Rescale demands so both sides total exactly the same mass.
  double sp = 0.0, sq = 0.0;
  for (double x : row_mass) sp += x;
  for (double x : col_mass) sq += x;
  gathered_demand_.resize(n);
  const double scale = sp / sq;
  for (int j = 0; j < n; ++j) gathered_demand_[j] = col_mass[j] * scale;
  return solve_dense(m, n, cost_buf_.data(), row_mass.data(), gathered_demand_.data(),
                     tols, warm_basis);
}

}  // namespace detail

WassersteinResult wasserstein(const Distribution& p, const Distribution& q,
                              const CostMatrix& cost, const TransportTolerances& tols) {
  require_distribution(p, "wasserstein: p");
  require_distribution(q, "wasserstein: q");
  require_cost(cost, p.mass.size(), q.mass.size());

  const Support sp = compact(p);
  const Support sq = compact(q);
  detail::TransportWorkspace ws;
  const double value = ws.min_cost_value(sp.idx, sp.mass, sq.idx, sq.mass, cost, tols);

  WassersteinResult result;
  result.value = value;
  result.plan.plan = Matrix(p.mass.size(), q.mass.size(), 0.0);
  for (const auto& arc : ws.arcs())
    if (arc.flow > 0.0) result.plan.plan(sp.idx[arc.row], sq.idx[arc.col]) = arc.flow;
  result.plan.row_marginal = p;
  result.plan.col_marginal = q;
  return result;
}

DualCertificate dual_certificate(const Distribution& p, const Distribution& q,
                                 const CostMatrix& cost, const CouplingPlan& plan,
                                 const TransportTolerances& tols) {
  require_distribution(p, "dual_certificate: p");
  require_distribution(q, "dual_certificate: q");
  require_cost(cost, p.mass.size(), q.mass.size());
  if (plan.plan.rows() != p.mass.size() || plan.plan.cols() != q.mass.size())
    throw ParameterError("dual_certificate: plan dimensions do not match supports");

  double plan_cost = 0.0;
  for (std::size_t i = 0; i < p.mass.size(); ++i)
    for (std::size_t j = 0; j < q.mass.size(); ++j)
      plan_cost += plan.plan(i, j) * cost(i, j);

  const Support sp = compact(p);
  const Support sq = compact(q);
  detail::TransportWorkspace ws;
  ws.min_cost_value(sp.idx, sp.mass, sq.idx, sq.mass, cost, tols);

  const auto u = ws.row_potentials();
  const auto v = ws.col_potentials();
  const std::size_t np = p.mass.size(), nq = q.mass.size();
  DualCertificate cert;
  cert.mu.assign(np, 0.0);
  cert.nu.assign(nq, 0.0);
  std::vector<char> has_mu(np, 0), has_nu(nq, 0);
  for (std::size_t k = 0; k < sp.idx.size(); ++k) {
    cert.mu[sp.idx[k]] = u[k];
    has_mu[sp.idx[k]] = 1;
  }
  for (std::size_t k = 0; k < sq.idx.size(); ++k) {
    cert.nu[sq.idx[k]] = -v[k];
    has_nu[sq.idx[k]] = 1;
  }
  // Extend to zero-mass points without breaking any constraint.
  for (std::size_t j = 0; j < nq; ++j) {
    if (has_nu[j]) continue;
    double lo = -kInf;
    for (std::size_t k = 0; k < sp.idx.size(); ++k)
      lo = std::max(lo, cert.mu[sp.idx[k]] - cost(sp.idx[k], j));
    cert.nu[j] = lo;
  }
  for (std::size_t i = 0; i < np; ++i) {
    if (has_mu[i]) continue;
    double hi = kInf;
    for (std::size_t j = 0; j < nq; ++j) hi = std::min(hi, cert.nu[j] + cost(i, j));
    cert.mu[i] = hi;
  }

  for (std::size_t i = 0; i < np; ++i)
    for (std::size_t j = 0; j < nq; ++j)
      if (cert.mu[i] - cert.nu[j] > cost(i, j) + tols.primal_feasibility)
        throw InternalError("dual certificate violates a constraint");

  double dual_obj = 0.0;
  for (std::size_t i = 0; i < np; ++i) dual_obj += cert.mu[i] * p.mass[i];
  for (std::size_t j = 0; j < nq; ++j) dual_obj -= cert.nu[j] * q.mass[j];

  if (std::abs(plan_cost - dual_obj) > tols.duality_gap) {
    std::ostringstream oss;
    oss << "dual_certificate: plan is not optimal (cost " << plan_cost
        << " vs dual objective " << dual_obj << ")";
    throw ParameterError(oss.str());
  }
  return cert;
}

GluedCoupling glue_couplings(const CouplingPlan& lambda13, const CouplingPlan& lambda32,
                             const TransportTolerances& tols) {
  const std::size_t n1 = lambda13.plan.rows();
  const std::size_t nm = lambda13.plan.cols();
  const std::size_t n2 = lambda32.plan.cols();
  if (lambda32.plan.rows() != nm)
    throw IncompatibilityError("glue_couplings: middle support sizes differ");

  std::vector<double> mid(nm, 0.0);
  for (std::size_t k = 0; k < nm; ++k) {
    double col_sum = 0.0, row_sum = 0.0;
    for (std::size_t i = 0; i < n1; ++i) col_sum += lambda13.plan(i, k);
    for (std::size_t j = 0; j < n2; ++j) row_sum += lambda32.plan(k, j);
    if (std::abs(col_sum - row_sum) > tols.primal_feasibility)
      throw IncompatibilityError(
          "glue_couplings: middle marginals disagree beyond tolerance");
    mid[k] = row_sum;
  }

  GluedCoupling out;
  out.dim1 = n1;
  out.dim_mid = nm;
  out.dim2 = n2;
  out.values.assign(n1 * nm * n2, 0.0);
  for (std::size_t k = 0; k < nm; ++k) {
    if (mid[k] <= 0.0) continue;
    for (std::size_t i = 0; i < n1; ++i) {
      const double lik = lambda13.plan(i, k);
      if (lik == 0.0) continue;
      for (std::size_t j = 0; j < n2; ++j)
        out.values[(i * nm + k) * n2 + j] = lik * lambda32.plan(k, j) / mid[k];
    }
  }
  return out;
}

double brute_force_wasserstein(const Distribution& p, const Distribution& q,
                               const CostMatrix& cost) {
  require_distribution(p, "brute_force_wasserstein: p");
  require_distribution(q, "brute_force_wasserstein: q");
  require_cost(cost, p.mass.size(), q.mass.size());

  const Support sp = compact(p);
  const Support sq = compact(q);
  const int m = static_cast<int>(sp.idx.size());
  const int n = static_cast<int>(sq.idx.size());
  if (m > 4 || n > 4)
    throw ParameterError("brute_force_wasserstein: oracle refuses supports larger than 4");

  double sm = 0.0, sn = 0.0;
  for (double x : sp.mass) sm += x;
  for (double x : sq.mass) sn += x;
  std::vector<double> demand(sq.mass);
  for (double& x : demand) x *= sm / sn;

  const int arcs = m * n;
  const int nodes = m + n;
  double best = kInf;
  std::vector<double> flow(arcs, 0.0);
  std::vector<double> balance(nodes, 0.0);
  std::vector<int> undetermined(nodes, 0);
  std::vector<char> done(arcs, 0);

  for (std::uint32_t mask = 0; mask < (1u << arcs); ++mask) {
    if (std::popcount(mask) != nodes - 1) continue;

    // Spanning check: all nodes reachable through selected arcs.
    std::uint32_t reached = 1;  // node 0
    for (int pass = 0; pass < nodes; ++pass)
      for (int e = 0; e < arcs; ++e) {
        if (!(mask >> e & 1)) continue;
        const std::uint32_t a = 1u << (e / n);
        const std::uint32_t b = 1u << (m + e % n);
        if ((reached & a) || (reached & b)) reached |= a | b;
      }
    if (std::popcount(reached) != nodes) continue;

    // Tree flows by repeated elimination of one-arc nodes.
    for (int i = 0; i < m; ++i) balance[i] = sp.mass[i];
    for (int j = 0; j < n; ++j) balance[m + j] = demand[j];
    std::fill(undetermined.begin(), undetermined.end(), 0);
    std::fill(done.begin(), done.end(), 0);
    for (int e = 0; e < arcs; ++e)
      if (mask >> e & 1) {
        ++undetermined[e / n];
        ++undetermined[m + e % n];
      }
    bool feasible = true;
    for (int solved = 0; solved < nodes - 1;) {
      int leaf = -1;
      for (int x = 0; x < nodes; ++x)
        if (undetermined[x] == 1) {
          leaf = x;
          break;
        }
      if (leaf < 0) {
        feasible = false;
        break;
      }
      int arc = -1;
      for (int e = 0; e < arcs; ++e)
        if ((mask >> e & 1) && !done[e] && (e / n == leaf || m + e % n == leaf)) {
          arc = e;
          break;
        }
      flow[arc] = balance[leaf];
      if (flow[arc] < -1e-12) {
        feasible = false;
        break;
      }
      done[arc] = 1;
      const int other = (leaf < m) ? m + arc % n : arc / n;
      balance[other] -= balance[leaf];
      balance[leaf] = 0.0;
      --undetermined[leaf];
      --undetermined[other];
      ++solved;
    }
    if (!feasible) continue;

    double value = 0.0;
    for (int e = 0; e < arcs; ++e)
      if (mask >> e & 1)
        value += std::max(flow[e], 0.0) * cost(sp.idx[e / n], sq.idx[e % n]);
    best = std::min(best, value);
  }
  if (!std::isfinite(best))
    throw InternalError("brute_force_wasserstein: no feasible basis found");
  return best;
}

}  // namespace bisim
