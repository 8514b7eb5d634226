#pragma once

/// @file multilevel.hpp
/// @brief Support prediction from approximate multipliers and the multilevel
/// active-set solver.
///
/// On each level the pairs whose approximate multipliers nearly satisfy the
/// complementarity condition, phi_i + psi_j >= c_ij - theta h^2, form a
/// reduced problem. Its multipliers are then tested against the dual
/// feasibility condition phi_i + psi_j <= c_ij + c_opt h^2 on the full grid.
/// A failed test doubles theta and retries the level; a passed test
/// prolongates the multipliers to the next level and halves theta.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlot/cost.hpp"
#include "mlot/detail/parallel.hpp"
#include "mlot/measure.hpp"
#include "mlot/mesh.hpp"
#include "mlot/network_simplex.hpp"
#include "mlot/transport.hpp"
#include "mlot/transport_types.hpp"

namespace mlot {

/// All (i, j) with phi_i + psi_j >= c(x_i, y_j) - threshold, scanning the
/// full M x N grid.
inline ActiveSet build_active_set(std::span<const double> phi, std::span<const double> psi,
                                  const CostFunction& cost, const Mesh& mesh_x,
                                  const Mesh& mesh_y, double threshold) {
  if (phi.size() != mesh_x.node_count() || psi.size() != mesh_y.node_count()) {
    throw std::invalid_argument("build_active_set: multipliers do not match meshes");
  }
  if (threshold < 0.0) throw std::invalid_argument("build_active_set: negative threshold");
  const auto& xs = mesh_x.nodes();
  const auto& ys = mesh_y.nodes();
  const std::size_t n = ys.size();
  auto pairs = detail::parallel_collect<IndexPair>(
      xs.size(), n, [&](std::size_t begin, std::size_t end, std::vector<IndexPair>& out) {
        for (std::size_t i = begin; i < end; ++i) {
          const double lift = phi[i] + threshold;
          for (std::size_t j = 0; j < n; ++j) {
            if (lift + psi[j] >= cost(xs[i], ys[j])) {
              out.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
            }
          }
        }
      });
  return ActiveSet::from_sorted(std::move(pairs));
}

/// Cells of the north-west corner plan; with `include_degenerate` the
/// zero-mass cells completing its spanning tree are kept as well.
inline ActiveSet north_west_support(std::span<const double> supply,
                                    std::span<const double> demand,
                                    bool include_degenerate = false) {
  std::vector<IndexPair> pairs;
  for (const auto& cell : north_west_corner(supply, demand)) {
    if (include_degenerate || cell.mass > 0.0) pairs.push_back({cell.row, cell.col});
  }
  return ActiveSet::from_sorted(std::move(pairs));
}

/// Adds the support of the north-west corner plan, which is feasible.
inline ActiveSet complete_feasible(const ActiveSet& active, std::span<const double> supply,
                                   std::span<const double> demand) {
  return active.united(north_west_support(supply, demand));
}

inline ActiveSet complete_feasible(const ActiveSet& active, const DiscreteMeasure& mu,
                                   const DiscreteMeasure& nu) {
  return complete_feasible(active, mu.weights(), nu.weights());
}

namespace detail {

template <class Visit>
void scan_violations(std::span<const double> phi, std::span<const double> psi,
                     const CostFunction& cost, const std::vector<Point>& xs,
                     const std::vector<Point>& ys, double tolerance, std::size_t begin,
                     std::size_t end, Visit&& visit) {
  const std::size_t n = ys.size();
  for (std::size_t i = begin; i < end; ++i) {
    const double slack = phi[i] - tolerance;
    for (std::size_t j = 0; j < n; ++j) {
      if (slack + psi[j] > cost(xs[i], ys[j])) visit(i, j);
    }
  }
}

}  // namespace detail

/// Pairs of the full grid violating phi_i + psi_j <= c(x_i, y_j) + tolerance.
/// Streams over rows; the cost matrix is never stored.
inline std::vector<IndexPair> check_optimality(std::span<const double> phi,
                                               std::span<const double> psi,
                                               const CostFunction& cost, const Mesh& mesh_x,
                                               const Mesh& mesh_y, double tolerance) {
  if (phi.size() != mesh_x.node_count() || psi.size() != mesh_y.node_count()) {
    throw std::invalid_argument("check_optimality: multipliers do not match meshes");
  }
  if (tolerance < 0.0) throw std::invalid_argument("check_optimality: negative tolerance");
  const auto& xs = mesh_x.nodes();
  const auto& ys = mesh_y.nodes();
  return detail::parallel_collect<IndexPair>(
      xs.size(), ys.size(), [&](std::size_t begin, std::size_t end, std::vector<IndexPair>& out) {
        detail::scan_violations(phi, psi, cost, xs, ys, tolerance, begin, end,
                                [&](std::size_t i, std::size_t j) {
                                  out.push_back({static_cast<std::uint32_t>(i),
                                                 static_cast<std::uint32_t>(j)});
                                });
      });
}

/// Number of pairs check_optimality would report.
inline std::size_t count_violations(std::span<const double> phi, std::span<const double> psi,
                                    const CostFunction& cost, const Mesh& mesh_x,
                                    const Mesh& mesh_y, double tolerance) {
  const auto& xs = mesh_x.nodes();
  const auto& ys = mesh_y.nodes();
  const auto counts = detail::parallel_collect<std::size_t>(
      xs.size(), ys.size(), [&](std::size_t begin, std::size_t end, std::vector<std::size_t>& out) {
        std::size_t count = 0;
        detail::scan_violations(phi, psi, cost, xs, ys, tolerance, begin, end,
                                [&](std::size_t, std::size_t) { ++count; });
        out.push_back(count);
      });
  std::size_t total = 0;
  for (auto c : counts) total += c;
  return total;
}

struct MultilevelParams {
  /// Activation constant; pairs within theta_act * h^2 of complementarity are activated.
  double theta_act = 1.0;
  /// Optimality-check constant; dual violations up to c_opt * h^2 are accepted.
  double c_opt = 1.0;
  int level_min = 0;
  int level_max = 0;
  /// Retries with doubled theta_act allowed on one level.
  int max_tolerance_increases = 25;
  /// Initialize the multipliers from a full solve on level_min.
  bool coarse_init = true;
  /// Shrink theta_act by halving while the first active-set level still passes.
  bool auto_tune_theta = false;
  /// Upper bound on the halvings tried by auto-tuning.
  int max_tune_halvings = 20;
  SolverOptions solver;

  void validate() const {
    if (!(theta_act > 0.0)) throw std::invalid_argument("MultilevelParams: theta_act must be > 0");
    if (!(c_opt > 0.0)) throw std::invalid_argument("MultilevelParams: c_opt must be > 0");
    if (level_min < 0 || level_min > level_max) {
      throw std::invalid_argument("MultilevelParams: need 0 <= level_min <= level_max");
    }
    if (max_tolerance_increases < 0) {
      throw std::invalid_argument("MultilevelParams: negative max_tolerance_increases");
    }
  }
};

struct LevelReport {
  int level = 0;
  std::size_t rows = 0;  // M
  std::size_t cols = 0;  // N
  std::size_t active_cardinality = 0;
  int tolerance_increases = 0;
  double objective = 0.0;
  double wall_time = 0.0;  // seconds
  double h = 0.0;
  /// theta_act of the accepted attempt.
  double theta_act = 0.0;
  std::size_t pivots = 0;
  /// Violations found by each optimality check on this level, in order.
  std::vector<std::size_t> violation_count_history;
};

struct LevelResult {
  std::shared_ptr<const Mesh> mesh_x;
  std::shared_ptr<const Mesh> mesh_y;
  DiscreteMeasure mu;
  DiscreteMeasure nu;
  TransportSolution solution;
  LevelReport report;
};

class MultilevelError : public std::runtime_error {
 public:
  MultilevelError(const std::string& what, LevelReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const LevelReport& report() const { return report_; }

 private:
  LevelReport report_;
};

/// Marginals and cost of a problem handed to multilevel_solve.
struct MultilevelInput {
  Domain domain_x;
  Domain domain_y;
  ScalarField density_f;
  ScalarField density_g;
  CostFunction cost = CostFunction::power(2.0);
};

using LevelCallback = std::function<void(const LevelResult&)>;

namespace detail {

struct Attempt {
  TransportSolution solution;
  std::size_t active_cardinality = 0;
  std::size_t violations = 0;
};

inline Attempt attempt_level(const MultilevelInput& input, const Mesh& mesh_x, const Mesh& mesh_y,
                             const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             std::span<const double> phi_guess, std::span<const double> psi_guess,
                             double activation, double check_tolerance,
                             const SolverOptions& options,
                             std::span<const IndexPair> warm_basis = {}) {
  ActiveSet active =
      build_active_set(phi_guess, psi_guess, input.cost, mesh_x, mesh_y, activation);
  // The complete north-west tree keeps the reduced support graph connected.
  active = active.united(north_west_support(mu.weights(), nu.weights(), true));
  const auto costs = assemble(mesh_x, mesh_y, input.cost, active);
  Attempt out;
  out.solution = solve_reduced(costs, mu, nu, active, options, warm_basis);
  if (!out.solution.optimal()) {
    throw std::logic_error("multilevel_solve: completed active set is infeasible");
  }
  out.active_cardinality = active.size();
  out.violations = count_violations(out.solution.phi, out.solution.psi, input.cost, mesh_x,
                                    mesh_y, check_tolerance);
  return out;
}

}  // namespace detail

/// Multilevel active-set solve from params.level_min to params.level_max.
/// Returns one result per level; `on_level` is invoked as each level finishes.
inline std::vector<LevelResult> multilevel_solve(const MultilevelInput& input,
                                                 const MultilevelParams& params,
                                                 const LevelCallback& on_level = {}) {
  params.validate();
  using Clock = std::chrono::steady_clock;

  auto mesh_x = std::make_shared<const Mesh>(build_mesh(input.domain_x, params.level_min));
  auto mesh_y = std::make_shared<const Mesh>(build_mesh(input.domain_y, params.level_min));
  std::vector<double> phi_guess, psi_guess;
  double theta = params.theta_act;
  const int tune_level = params.level_max > params.level_min ? params.level_min + 1
                                                             : params.level_min;

  std::vector<LevelResult> results;
  for (int level = params.level_min;; ++level) {
    const auto start = Clock::now();
    DiscreteMeasure mu = discretize_density(mesh_x, input.density_f);
    DiscreteMeasure nu = discretize_density(mesh_y, input.density_g);
    if (level == params.level_min) {
      if (params.coarse_init) {
        const auto full = solve_full(*mesh_x, *mesh_y, input.cost, mu, nu, params.solver);
        phi_guess = full.phi;
        psi_guess = full.psi;
      } else {
        phi_guess.assign(mesh_x->node_count(), 0.0);
        psi_guess.assign(mesh_y->node_count(), 0.0);
      }
    }

    const double h = std::max(mesh_x->h(), mesh_y->h());
    const double check_tolerance = params.c_opt * h * h;
    LevelReport report;
    report.level = level;
    report.rows = mesh_x->node_count();
    report.cols = mesh_y->node_count();
    report.h = h;

    auto attempt = [&](double th, std::span<const IndexPair> warm = {}) {
      auto a = detail::attempt_level(input, *mesh_x, *mesh_y, mu, nu, phi_guess, psi_guess,
                                     th * h * h, check_tolerance, params.solver, warm);
      report.violation_count_history.push_back(a.violations);
      report.pivots += a.solution.stats.pivots;
      return a;
    };

    detail::Attempt accepted = attempt(theta);
    while (accepted.violations != 0) {
      if (report.tolerance_increases >= params.max_tolerance_increases) {
        report.active_cardinality = accepted.active_cardinality;
        report.objective = accepted.solution.objective;
        report.theta_act = theta;
        report.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
        throw MultilevelError("multilevel_solve: optimality check still fails on level " +
                                  std::to_string(level) + " after " +
                                  std::to_string(report.tolerance_increases) +
                                  " tolerance increases",
                              report);
      }
      theta *= 2.0;
      ++report.tolerance_increases;
      // The larger active set contains the previous optimal basis.
      accepted = attempt(theta, accepted.solution.basis);
    }
    if (params.auto_tune_theta && level == tune_level && report.tolerance_increases == 0) {
      for (int k = 0; k < params.max_tune_halvings; ++k) {
        detail::Attempt probe = attempt(0.5 * theta);
        if (probe.violations != 0) break;
        theta *= 0.5;
        accepted = std::move(probe);
      }
    }

    report.active_cardinality = accepted.active_cardinality;
    report.objective = accepted.solution.objective;
    report.theta_act = theta;
    report.wall_time = std::chrono::duration<double>(Clock::now() - start).count();

    results.push_back(LevelResult{mesh_x, mesh_y, std::move(mu), std::move(nu),
                                  std::move(accepted.solution), std::move(report)});
    if (on_level) on_level(results.back());
    if (level >= params.level_max) break;

    auto fine_x = std::make_shared<const Mesh>(refine(*mesh_x));
    auto fine_y = std::make_shared<const Mesh>(refine(*mesh_y));
    const auto& last = results.back().solution;
    phi_guess = prolongate(*mesh_x, *fine_x, last.phi);
    psi_guess = prolongate(*mesh_y, *fine_y, last.psi);
    mesh_x = std::move(fine_x);
    mesh_y = std::move(fine_y);
    theta *= 0.5;
  }
  return results;
}

}  // namespace mlot
