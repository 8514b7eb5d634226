#pragma once

/// @file network_simplex.hpp
/// @brief Primal network simplex for transportation problems on a sparse set
/// of admissible pairs.
///
/// Rows (sources) occupy nodes [0, M), columns (targets) nodes [M, M + N).
/// Every arc runs from a row to a column and carries a nonnegative flow. The
/// basis is a spanning tree rooted at column 0 whose potentials are the
/// multipliers: phi_i + psi_j = c_ij on tree arcs, psi_0 = 0.
///
/// The initial tree is a caller-supplied basis when it is a spanning tree
/// with nonnegative flows, and the north-west corner plan otherwise. Tree
/// pairs missing from the admissible set are replaced by artificial arcs with
/// a prohibitive cost; they may leave the basis but never re-enter.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "mlot/transport_types.hpp"

namespace mlot {

/// North-west corner plan over all atoms in index order. Always returns
/// exactly M + N - 1 cells forming a spanning tree; cells may carry zero mass
/// where partial sums of supply and demand coincide.
inline std::vector<PlanEntry> north_west_corner(std::span<const double> supply,
                                                std::span<const double> demand) {
  const std::size_t m = supply.size(), n = demand.size();
  if (m == 0 || n == 0) throw std::invalid_argument("north_west_corner: empty marginal");
  std::vector<PlanEntry> cells;
  cells.reserve(m + n - 1);
  std::size_t i = 0, j = 0;
  double ra = supply[0], rb = demand[0];
  auto emit = [&](double x) {
    cells.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                     std::max(0.0, x)});
  };
  while (true) {
    if (i + 1 == m && j + 1 == n) {
      emit(0.5 * (ra + rb));
      break;
    }
    if (i + 1 == m || (j + 1 < n && ra > rb)) {
      emit(rb);
      ra -= rb;
      rb = demand[++j];
    } else {
      emit(ra);
      rb -= ra;
      ra = supply[++i];
    }
  }
  return cells;
}

/// Flows of the spanning tree `pairs` that meet the marginals, or an empty
/// vector when `pairs` is not a spanning tree or a flow is negative.
inline std::vector<PlanEntry> tree_plan(std::span<const double> supply,
                                        std::span<const double> demand,
                                        std::span<const IndexPair> pairs) {
  const std::size_t m = supply.size(), n = demand.size(), nodes = m + n;
  if (pairs.size() + 1 != nodes) return {};
  std::vector<std::uint32_t> degree(nodes, 0);
  std::vector<std::size_t> incident(nodes, 0);  // xor of incident pair indices
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (pairs[k].row >= m || pairs[k].col >= n) return {};
    ++degree[pairs[k].row];
    ++degree[m + pairs[k].col];
    incident[pairs[k].row] ^= k;
    incident[m + pairs[k].col] ^= k;
  }
  std::vector<double> residual(supply.begin(), supply.end());
  residual.insert(residual.end(), demand.begin(), demand.end());
  std::vector<std::uint32_t> leaves;
  for (std::uint32_t v = 0; v < nodes; ++v) {
    if (degree[v] == 1) leaves.push_back(v);
  }
  std::vector<PlanEntry> plan(pairs.size());
  const double slack = 1e-12 * static_cast<double>(nodes);
  std::size_t peeled = 0;
  while (!leaves.empty() && peeled < pairs.size()) {
    const std::uint32_t leaf = leaves.back();
    leaves.pop_back();
    if (degree[leaf] != 1) continue;
    const std::size_t k = incident[leaf];
    const std::uint32_t r = pairs[k].row, c = static_cast<std::uint32_t>(m + pairs[k].col);
    const std::uint32_t other = leaf == r ? c : r;
    const double x = residual[leaf];
    if (x < -slack) return {};
    plan[k] = {pairs[k].row, pairs[k].col, std::max(0.0, x)};
    residual[other] -= x;
    degree[leaf] = 0;
    incident[other] ^= k;
    if (--degree[other] == 1) leaves.push_back(other);
    ++peeled;
  }
  if (peeled != pairs.size()) return {};  // a cycle, hence not spanning
  return plan;
}

class TransportSimplex {
 public:
  /// `costs[k]` is the cost of `active[k]`. `warm_basis` optionally names
  /// the M + N - 1 pairs of a starting tree.
  TransportSimplex(std::span<const double> supply, std::span<const double> demand,
                   const ActiveSet& active, std::span<const double> costs,
                   const SolverOptions& options = {},
                   std::span<const IndexPair> warm_basis = {})
      : rows_(supply.size()), cols_(demand.size()), options_(options) {
    if (rows_ == 0 || cols_ == 0) throw std::invalid_argument("TransportSimplex: empty marginal");
    if (costs.size() != active.size()) {
      throw std::invalid_argument("TransportSimplex: cost count does not match active set");
    }
    double total_a = 0.0, total_b = 0.0;
    for (double w : supply) {
      if (!(w >= 0.0)) throw std::invalid_argument("TransportSimplex: negative supply");
      total_a += w;
    }
    for (double w : demand) {
      if (!(w >= 0.0)) throw std::invalid_argument("TransportSimplex: negative demand");
      total_b += w;
    }
    if (std::abs(total_a - total_b) > 1e-12 * std::max(1.0, total_a)) {
      throw std::invalid_argument("TransportSimplex: supply and demand masses differ");
    }

    real_arcs_ = active.size();
    tail_.reserve(real_arcs_ + rows_ + cols_);
    head_.reserve(real_arcs_ + rows_ + cols_);
    cost_.reserve(real_arcs_ + rows_ + cols_);
    double max_cost = 0.0;
    for (std::size_t k = 0; k < real_arcs_; ++k) {
      const IndexPair p = active[k];
      if (p.row >= rows_ || p.col >= cols_) {
        throw std::out_of_range("TransportSimplex: active pair outside the index range");
      }
      tail_.push_back(p.row);
      head_.push_back(static_cast<std::uint32_t>(rows_ + p.col));
      cost_.push_back(costs[k]);
      max_cost = std::max(max_cost, std::abs(costs[k]));
    }
    cost_scale_ = std::max(1.0, max_cost);
    // Exceeds the cost of any real path between two nodes of the tree.
    artificial_cost_ = 1.0 + 2.0 * static_cast<double>(rows_ + cols_) * cost_scale_;
    stall_limit_ = options_.stall_limit ? options_.stall_limit : 50 * (rows_ + cols_);

    std::vector<PlanEntry> nw;
    if (!warm_basis.empty()) nw = tree_plan(supply, demand, warm_basis);
    stats_.warm_started = !nw.empty();
    if (nw.empty()) nw = north_west_corner(supply, demand);
    flow_.assign(real_arcs_, 0.0);
    state_.assign(real_arcs_, kNonbasic);
    std::vector<std::uint32_t> tree_arcs;
    tree_arcs.reserve(nw.size());
    for (const auto& cell : nw) {
      std::size_t a = active.find({cell.row, cell.col});
      if (a == active.size()) {
        a = tail_.size();
        tail_.push_back(cell.row);
        head_.push_back(static_cast<std::uint32_t>(rows_ + cell.col));
        cost_.push_back(artificial_cost_);
        flow_.push_back(0.0);
        state_.push_back(kNonbasic);
      }
      flow_[a] = cell.mass;
      state_[a] = kBasic;
      tree_arcs.push_back(static_cast<std::uint32_t>(a));
    }
    stats_.artificial_arcs = tail_.size() - real_arcs_;

    const std::size_t nodes = rows_ + cols_;
    adjacency_.assign(nodes, {});
    for (auto a : tree_arcs) {
      adjacency_[tail_[a]].push_back(a);
      adjacency_[head_[a]].push_back(a);
    }
    parent_.assign(nodes, kNone);
    pred_.assign(nodes, kNone);
    depth_.assign(nodes, 0);
    potential_.assign(nodes, 0.0);
    const auto root = static_cast<std::uint32_t>(rows_);
    std::size_t reached = 1 + hang_subtree(root);
    if (reached != nodes) throw std::logic_error("TransportSimplex: initial basis is not a tree");
  }

  TransportSolution solve() {
    const double tol = options_.reduced_cost_tolerance * cost_scale_;
    block_size_ = std::max<std::size_t>(
        10, static_cast<std::size_t>(std::sqrt(static_cast<double>(tail_.size()))));
    while (true) {
      const std::size_t entering = bland_ ? select_bland(tol)
                                   : options_.pricing == PricingRule::kDantzig
                                       ? select_dantzig(tol)
                                       : select_block(tol);
      if (entering == kNoArc) break;
      pivot(static_cast<std::uint32_t>(entering));
    }
    return extract();
  }

 private:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  static constexpr std::size_t kNoArc = std::numeric_limits<std::size_t>::max();
  static constexpr std::uint8_t kNonbasic = 0;
  static constexpr std::uint8_t kBasic = 1;
  static constexpr std::uint8_t kRetired = 2;  // artificial arc that left the basis

  bool is_row(std::uint32_t node) const { return node < rows_; }
  bool is_artificial(std::size_t a) const { return a >= real_arcs_; }

  /// Tie-breaking order: artificial arcs first, then admissible pairs in set order.
  std::size_t ordinal(std::size_t a) const {
    const std::size_t artificial = tail_.size() - real_arcs_;
    return is_artificial(a) ? a - real_arcs_ : a + artificial;
  }

  double reduced_cost(std::size_t a) const {
    return cost_[a] - potential_[tail_[a]] - potential_[head_[a]];
  }

  std::uint32_t other_end(std::uint32_t a, std::uint32_t node) const {
    return tail_[a] == node ? head_[a] : tail_[a];
  }

  /// Sets parent, depth and potential for every node below `top` (whose own
  /// fields must already be valid). Returns the number of nodes visited.
  std::size_t hang_subtree(std::uint32_t top) {
    std::size_t visited = 0;
    stack_.clear();
    stack_.push_back(top);
    while (!stack_.empty()) {
      const std::uint32_t x = stack_.back();
      stack_.pop_back();
      for (std::uint32_t a : adjacency_[x]) {
        if (a == pred_[x]) continue;
        const std::uint32_t y = other_end(a, x);
        parent_[y] = x;
        pred_[y] = a;
        depth_[y] = depth_[x] + 1;
        potential_[y] = cost_[a] - potential_[x];
        stack_.push_back(y);
        ++visited;
      }
    }
    return visited;
  }

  std::size_t select_dantzig(double tol) const {
    std::size_t best = kNoArc;
    double best_rc = -tol;
    for (std::size_t a = 0; a < tail_.size(); ++a) {
      if (state_[a] != kNonbasic) continue;
      const double rc = reduced_cost(a);
      if (rc < best_rc) {
        best_rc = rc;
        best = a;
      }
    }
    return best;
  }

  std::size_t select_block(double tol) {
    const std::size_t arcs = tail_.size();
    std::size_t best = kNoArc;
    double best_rc = -tol;
    std::size_t in_block = 0;
    std::size_t a = next_arc_;
    for (std::size_t scanned = 0; scanned < arcs; ++scanned) {
      if (state_[a] == kNonbasic) {
        const double rc = reduced_cost(a);
        if (rc < best_rc) {
          best_rc = rc;
          best = a;
        }
      }
      if (++a == arcs) a = 0;
      if (++in_block == block_size_) {
        if (best != kNoArc) break;
        in_block = 0;
      }
    }
    next_arc_ = a;
    return best;
  }

  std::size_t select_bland(double tol) const {
    // ordinal order: artificial arcs, then real arcs
    for (std::size_t a = real_arcs_; a < tail_.size(); ++a) {
      if (state_[a] == kNonbasic && reduced_cost(a) < -tol) return a;
    }
    for (std::size_t a = 0; a < real_arcs_; ++a) {
      if (state_[a] == kNonbasic && reduced_cost(a) < -tol) return a;
    }
    return kNoArc;
  }

  void pivot(std::uint32_t entering) {
    const std::uint32_t u = tail_[entering];  // row
    const std::uint32_t v = head_[entering];  // column
    std::uint32_t a = u, b = v;
    while (a != b) {
      if (depth_[a] > depth_[b]) {
        a = parent_[a];
      } else if (depth_[b] > depth_[a]) {
        b = parent_[b];
      } else {
        a = parent_[a];
        b = parent_[b];
      }
    }
    const std::uint32_t apex = a;

    // Pushing theta along u -> v decreases the tree arcs above row nodes on
    // the u side and above column nodes on the v side.
    double theta = std::numeric_limits<double>::infinity();
    std::uint32_t leaving = kNone;
    bool leaving_on_u_side = false;
    auto consider = [&](std::uint32_t arc, bool u_side) {
      const double f = flow_[arc];
      if (f < theta || (f == theta && ordinal(arc) < ordinal(leaving))) {
        theta = f;
        leaving = arc;
        leaving_on_u_side = u_side;
      }
    };
    for (std::uint32_t w = u; w != apex; w = parent_[w]) {
      if (is_row(w)) consider(pred_[w], true);
    }
    for (std::uint32_t w = v; w != apex; w = parent_[w]) {
      if (!is_row(w)) consider(pred_[w], false);
    }

    ++stats_.pivots;
    if (bland_) ++stats_.bland_pivots;
    if (theta > 0.0) {
      flow_[entering] += theta;
      for (std::uint32_t w = u; w != apex; w = parent_[w]) {
        flow_[pred_[w]] += is_row(w) ? -theta : theta;
      }
      for (std::uint32_t w = v; w != apex; w = parent_[w]) {
        flow_[pred_[w]] += is_row(w) ? theta : -theta;
      }
      degenerate_run_ = 0;
      bland_ = false;
    } else {
      ++stats_.degenerate_pivots;
      if (++degenerate_run_ > stall_limit_) bland_ = true;
    }
    flow_[leaving] = 0.0;

    state_[entering] = kBasic;
    state_[leaving] = is_artificial(leaving) ? kRetired : kNonbasic;
    detach(tail_[leaving], leaving);
    detach(head_[leaving], leaving);
    adjacency_[u].push_back(entering);
    adjacency_[v].push_back(entering);

    // The subtree cut off by the leaving arc hangs from the entering arc now.
    const std::uint32_t s = leaving_on_u_side ? u : v;
    const std::uint32_t t = leaving_on_u_side ? v : u;
    parent_[s] = t;
    pred_[s] = entering;
    depth_[s] = depth_[t] + 1;
    potential_[s] = cost_[entering] - potential_[t];
    hang_subtree(s);
  }

  void detach(std::uint32_t node, std::uint32_t arc) {
    auto& list = adjacency_[node];
    auto it = std::find(list.begin(), list.end(), arc);
    *it = list.back();
    list.pop_back();
  }

  TransportSolution extract() const {
    TransportSolution sol;
    sol.stats = stats_;
    sol.status = SolveStatus::kOptimal;
    for (std::size_t a = real_arcs_; a < tail_.size(); ++a) {
      if (flow_[a] > options_.feasibility_tolerance) sol.status = SolveStatus::kInfeasible;
    }
    double objective = 0.0;
    for (std::size_t a = 0; a < tail_.size(); ++a) {
      if (state_[a] == kBasic) {
        sol.basis.push_back({tail_[a], head_[a] - static_cast<std::uint32_t>(rows_)});
      }
    }
    for (std::size_t a = 0; a < real_arcs_; ++a) {
      if (state_[a] == kBasic && flow_[a] > 0.0) {
        sol.plan.push_back({tail_[a], head_[a] - static_cast<std::uint32_t>(rows_), flow_[a]});
        objective += flow_[a] * cost_[a];
      }
    }
    sol.objective = objective;
    sol.phi.assign(potential_.begin(), potential_.begin() + static_cast<std::ptrdiff_t>(rows_));
    sol.psi.assign(potential_.begin() + static_cast<std::ptrdiff_t>(rows_), potential_.end());
    return sol;
  }

  std::size_t rows_;
  std::size_t cols_;
  SolverOptions options_;
  std::size_t real_arcs_ = 0;
  double cost_scale_ = 1.0;
  double artificial_cost_ = 1.0;
  std::size_t stall_limit_ = 0;

  std::vector<std::uint32_t> tail_;
  std::vector<std::uint32_t> head_;
  std::vector<double> cost_;
  std::vector<double> flow_;
  std::vector<std::uint8_t> state_;

  std::vector<std::vector<std::uint32_t>> adjacency_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> pred_;
  std::vector<std::uint32_t> depth_;
  std::vector<double> potential_;
  std::vector<std::uint32_t> stack_;

  std::size_t block_size_ = 10;
  std::size_t next_arc_ = 0;
  std::size_t degenerate_run_ = 0;
  bool bland_ = false;
  SolverStats stats_;
};

}  // namespace mlot
