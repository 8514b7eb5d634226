#pragma once

/// @file transport.hpp
/// @brief Assembly and solution of full and reduced discrete transport problems.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlot/cost.hpp"
#include "mlot/measure.hpp"
#include "mlot/mesh.hpp"
#include "mlot/network_simplex.hpp"
#include "mlot/transport_types.hpp"

namespace mlot {

/// Costs c(x_i, y_j) for every pair of `active`, in set order.
inline std::vector<double> assemble(const Mesh& mesh_x, const Mesh& mesh_y,
                                    const CostFunction& cost, const ActiveSet& active) {
  std::vector<double> costs;
  costs.reserve(active.size());
  const auto& xs = mesh_x.nodes();
  const auto& ys = mesh_y.nodes();
  for (const auto& p : active) costs.push_back(cost(xs[p.row], ys[p.col]));
  return costs;
}

inline TransportSolution solve_reduced(std::span<const double> costs,
                                       std::span<const double> supply,
                                       std::span<const double> demand, const ActiveSet& active,
                                       const SolverOptions& options = {},
                                       std::span<const IndexPair> warm_basis = {}) {
  TransportSimplex simplex(supply, demand, active, costs, options, warm_basis);
  return simplex.solve();
}

inline TransportSolution solve_reduced(std::span<const double> costs, const DiscreteMeasure& mu,
                                       const DiscreteMeasure& nu, const ActiveSet& active,
                                       const SolverOptions& options = {},
                                       std::span<const IndexPair> warm_basis = {}) {
  return solve_reduced(costs, mu.weights(), nu.weights(), active, options, warm_basis);
}

/// Solves the problem over all M * N pairs.
inline TransportSolution solve_full(const Mesh& mesh_x, const Mesh& mesh_y,
                                    const CostFunction& cost, const DiscreteMeasure& mu,
                                    const DiscreteMeasure& nu, const SolverOptions& options = {}) {
  const std::size_t m = mu.size(), n = nu.size();
  if (m != mesh_x.node_count() || n != mesh_y.node_count()) {
    throw std::invalid_argument("solve_full: measure does not match mesh");
  }
  if (m * n > options.full_lp_cap) {
    throw std::length_error("solve_full: M*N = " + std::to_string(m * n) +
                            " exceeds the full-problem cap " +
                            std::to_string(options.full_lp_cap) +
                            "; use the multilevel active-set solver");
  }
  const ActiveSet all = ActiveSet::full(m, n);
  const auto costs = assemble(mesh_x, mesh_y, cost, all);
  return solve_reduced(costs, mu, nu, all, options);
}

}  // namespace mlot
