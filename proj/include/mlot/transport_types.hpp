#pragma once

/// @file transport_types.hpp
/// @brief Index sets, plans and solutions of discrete transportation problems.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <stdexcept>
#include <vector>

namespace mlot {

/// Pair (i, j) of a source atom i and a target atom j, zero-based.
struct IndexPair {
  std::uint32_t row = 0;
  std::uint32_t col = 0;

  friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
};

/// Sorted, duplicate-free set of index pairs defining a reduced problem.
class ActiveSet {
 public:
  using const_iterator = std::vector<IndexPair>::const_iterator;

  ActiveSet() = default;

  /// Sorts and removes duplicates.
  static ActiveSet from_pairs(std::vector<IndexPair> pairs) {
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    ActiveSet s;
    s.pairs_ = std::move(pairs);
    return s;
  }

  /// Takes ownership of pairs that are already sorted and unique.
  static ActiveSet from_sorted(std::vector<IndexPair> pairs) {
    for (std::size_t k = 1; k < pairs.size(); ++k) {
      if (!(pairs[k - 1] < pairs[k])) {
        throw std::invalid_argument("ActiveSet::from_sorted: pairs not strictly increasing");
      }
    }
    ActiveSet s;
    s.pairs_ = std::move(pairs);
    return s;
  }

  /// All M * N pairs.
  static ActiveSet full(std::size_t rows, std::size_t cols) {
    std::vector<IndexPair> pairs;
    pairs.reserve(rows * cols);
    for (std::uint32_t i = 0; i < rows; ++i) {
      for (std::uint32_t j = 0; j < cols; ++j) pairs.push_back({i, j});
    }
    ActiveSet s;
    s.pairs_ = std::move(pairs);
    return s;
  }

  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const IndexPair& operator[](std::size_t k) const { return pairs_[k]; }
  const_iterator begin() const { return pairs_.begin(); }
  const_iterator end() const { return pairs_.end(); }
  const std::vector<IndexPair>& pairs() const { return pairs_; }

  /// Position of `p` in the set, or size() when absent.
  std::size_t find(IndexPair p) const {
    auto it = std::lower_bound(pairs_.begin(), pairs_.end(), p);
    return (it != pairs_.end() && *it == p) ? static_cast<std::size_t>(it - pairs_.begin())
                                            : pairs_.size();
  }
  bool contains(IndexPair p) const { return find(p) != pairs_.size(); }

  bool includes(const ActiveSet& other) const {
    return std::includes(pairs_.begin(), pairs_.end(), other.pairs_.begin(), other.pairs_.end());
  }

  ActiveSet united(const ActiveSet& other) const {
    ActiveSet s;
    s.pairs_.reserve(pairs_.size() + other.pairs_.size());
    std::set_union(pairs_.begin(), pairs_.end(), other.pairs_.begin(), other.pairs_.end(),
                   std::back_inserter(s.pairs_));
    return s;
  }

  friend bool operator==(const ActiveSet&, const ActiveSet&) = default;

 private:
  std::vector<IndexPair> pairs_;
};

struct PlanEntry {
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  double mass = 0.0;
};

enum class SolveStatus { kOptimal, kInfeasible };

enum class PricingRule {
  /// Most negative reduced cost within cyclically scanned blocks of arcs.
  kBlockSearch,
  /// Most negative reduced cost over all arcs.
  kDantzig,
};

struct SolverOptions {
  PricingRule pricing = PricingRule::kBlockSearch;
  /// Entering threshold on reduced costs, relative to max(1, max |c|).
  double reduced_cost_tolerance = 1e-10;
  /// Mass an artificial arc may carry before the problem counts as infeasible.
  double feasibility_tolerance = 1e-12;
  /// Consecutive degenerate pivots before switching to Bland's rule;
  /// 0 selects 50 * (M + N).
  std::size_t stall_limit = 0;
  /// Largest M * N that solve_full will materialize.
  std::size_t full_lp_cap = 5'000'000;
};

struct SolverStats {
  std::size_t pivots = 0;
  std::size_t degenerate_pivots = 0;
  std::size_t bland_pivots = 0;
  std::size_t artificial_arcs = 0;
  bool warm_started = false;
};

/// Optimal basic plan with multipliers. The multipliers satisfy
/// phi_i + psi_j = c_ij on every basic pair and are gauged so that psi_0 = 0.
struct TransportSolution {
  std::vector<PlanEntry> plan;
  std::vector<double> phi;
  std::vector<double> psi;
  double objective = 0.0;
  SolveStatus status = SolveStatus::kOptimal;
  SolverStats stats;
  /// All M + N - 1 basic pairs, zero-flow ones included. Accepted as a warm
  /// start by TransportSimplex.
  std::vector<IndexPair> basis;

  bool optimal() const { return status == SolveStatus::kOptimal; }
};

}  // namespace mlot
