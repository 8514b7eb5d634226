#pragma once

/// @file problems.hpp
/// @brief Benchmark transport problems with closed-form solutions for the
/// quadratic cost, and reference-value helpers for convergence studies.
///
///   ex1  X = Y = [0,1], f = 2(x+1)/3, g = 1.
///   ex2  X = [0,1]^2, Y = [0,2]x[0,3], f = 12 x2, g = 1 (total mass 6).
///   ex3  X = Y = [-1/2,1/2]^2, oscillating f built from q, g = 1.
///   ex4  X = [-1/2,1/2]^2, Y = ([-3/2,-1] u [1,3/2]) x [-1/2,1/2], f = g = 1.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "mlot/cost.hpp"
#include "mlot/mesh.hpp"
#include "mlot/multilevel.hpp"

namespace mlot {

using VectorField = std::function<Point(const Point&)>;

/// Closed-form optimal transport data for the quadratic cost.
struct ExactSolution {
  ScalarField potential;   // Phi, with T = grad Phi
  VectorField map;         // T
  ScalarField multiplier;  // phi = |x|^2 / 2 - Phi
  /// Optimal cost for c_2 between the unnormalized marginals.
  double optimal_cost = 0.0;
};

struct Problem {
  std::string name;
  Domain domain_x;
  Domain domain_y;
  ScalarField density_f;
  ScalarField density_g;
  /// Common total mass of both marginals; discrete measures are normalized
  /// to 1, so LP objectives scale by this factor.
  double total_mass = 1.0;
  /// Coarsest level at which every box of both domains is resolved.
  int min_level = 0;
  std::optional<ExactSolution> exact;

  MultilevelInput input(const CostFunction& cost) const {
    return MultilevelInput{domain_x, domain_y, density_f, density_g, cost};
  }
};

struct QValues {
  double q = 0.0;
  double dq = 0.0;
  double d2q = 0.0;
};

/// q(z) = (-z^2/(8 pi) + 1/(256 pi^3) + 1/(32 pi)) cos(8 pi z) + z sin(8 pi z) / (32 pi^2)
/// and its first two derivatives.
inline QValues q_funcs(double z) {
  constexpr double pi = std::numbers::pi;
  constexpr double w = 8.0 * pi;
  const double a = -z * z / (8.0 * pi) + 1.0 / (256.0 * pi * pi * pi) + 1.0 / (32.0 * pi);
  const double da = -z / (4.0 * pi);
  const double d2a = -1.0 / (4.0 * pi);
  const double b = z / (32.0 * pi * pi);
  const double db = 1.0 / (32.0 * pi * pi);
  const double c = std::cos(w * z), s = std::sin(w * z);
  QValues out;
  out.q = a * c + b * s;
  out.dq = da * c - w * a * s + db * s + w * b * c;
  out.d2q = d2a * c - 2.0 * w * da * s - w * w * a * c + 2.0 * w * db * c - w * w * b * s;
  return out;
}

namespace detail {

/// Composite 20-point Gauss-Legendre rule on a rectangle.
template <class F>
double integrate_rectangle(F&& f, double x0, double x1, double y0, double y1, int cells) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const double hx = (x1 - x0) / cells, hy = (y1 - y0) / cells;
  double total = 0.0;
  for (int a = 0; a < cells; ++a) {
    for (int b = 0; b < cells; ++b) {
      const double xa = x0 + a * hx, yb = y0 + b * hy;
      total += Rule::integrate(
          [&](double x) {
            return Rule::integrate([&](double y) { return f(Point{x, y}); }, yb, yb + hy);
          },
          xa, xa + hx);
    }
  }
  return total;
}

inline double ex3_density(const Point& x) {
  const QValues a = q_funcs(x[0]);
  const QValues b = q_funcs(x[1]);
  return 1.0 + 4.0 * (a.d2q * b.q + a.q * b.d2q) +
         16.0 * (a.q * b.q * a.d2q * b.d2q - a.dq * a.dq * b.dq * b.dq);
}

inline Problem make_ex1() {
  Problem p;
  p.name = "ex1";
  p.domain_x = Domain::interval(0.0, 1.0);
  p.domain_y = Domain::interval(0.0, 1.0);
  p.density_f = [](const Point& x) { return 2.0 / 3.0 * (x[0] + 1.0); };
  p.density_g = [](const Point&) { return 1.0; };
  ExactSolution e;
  e.potential = [](const Point& x) { return x[0] * x[0] * x[0] / 9.0 + x[0] * x[0] / 3.0; };
  e.map = [](const Point& x) { return Point{x[0] * x[0] / 3.0 + 2.0 * x[0] / 3.0, 0.0}; };
  e.multiplier = [](const Point& x) { return x[0] * x[0] / 6.0 - x[0] * x[0] * x[0] / 9.0; };
  e.optimal_cost = 1.0 / 540.0;
  p.exact = std::move(e);
  return p;
}

inline Problem make_ex2() {
  Problem p;
  p.name = "ex2";
  p.domain_x = Domain::rectangle(0.0, 1.0, 0.0, 1.0);
  p.domain_y = Domain::rectangle(0.0, 2.0, 0.0, 3.0);
  p.density_f = [](const Point& x) { return 12.0 * x[1]; };
  p.density_g = [](const Point&) { return 1.0; };
  p.total_mass = 6.0;
  ExactSolution e;
  e.potential = [](const Point& x) { return x[0] * x[0] + x[1] * x[1] * x[1]; };
  e.map = [](const Point& x) { return Point{2.0 * x[0], 3.0 * x[1] * x[1]}; };
  e.multiplier = [](const Point& x) {
    return 0.5 * (x[0] * x[0] + x[1] * x[1]) - x[0] * x[0] - x[1] * x[1] * x[1];
  };
  e.optimal_cost = 43.0 / 10.0;
  p.exact = std::move(e);
  return p;
}

inline Problem make_ex3() {
  Problem p;
  p.name = "ex3";
  p.domain_x = Domain::rectangle(-0.5, 0.5, -0.5, 0.5);
  p.domain_y = Domain::rectangle(-0.5, 0.5, -0.5, 0.5);
  p.density_f = ex3_density;
  p.density_g = [](const Point&) { return 1.0; };
  // Phi = |x|^2/2 + 4 q(x1) q(x2) solves det D^2 Phi = f with g = 1.
  ExactSolution e;
  e.potential = [](const Point& x) {
    return 0.5 * (x[0] * x[0] + x[1] * x[1]) + 4.0 * q_funcs(x[0]).q * q_funcs(x[1]).q;
  };
  e.map = [](const Point& x) {
    const QValues a = q_funcs(x[0]), b = q_funcs(x[1]);
    return Point{x[0] + 4.0 * a.dq * b.q, x[1] + 4.0 * a.q * b.dq};
  };
  e.multiplier = [](const Point& x) { return -4.0 * q_funcs(x[0]).q * q_funcs(x[1]).q; };
  e.optimal_cost = integrate_rectangle(
      [](const Point& x) {
        const QValues a = q_funcs(x[0]), b = q_funcs(x[1]);
        const double d0 = 4.0 * a.dq * b.q, d1 = 4.0 * a.q * b.dq;
        return 0.5 * (d0 * d0 + d1 * d1) * ex3_density(x);
      },
      -0.5, 0.5, -0.5, 0.5, 16);
  p.exact = std::move(e);
  return p;
}

inline Problem make_ex4() {
  Problem p;
  p.name = "ex4";
  p.domain_x = Domain::rectangle(-0.5, 0.5, -0.5, 0.5);
  p.domain_y = Domain(2, {Box{{-1.5, -0.5}, {-1.0, 0.5}}, Box{{1.0, -0.5}, {1.5, 0.5}}});
  p.density_f = [](const Point&) { return 1.0; };
  p.density_g = [](const Point&) { return 1.0; };
  p.min_level = 1;
  ExactSolution e;
  e.potential = [](const Point& x) {
    return 0.5 * (x[0] * x[0] + x[1] * x[1]) + std::abs(x[0]);
  };
  e.map = [](const Point& x) { return Point{x[0] > 0.0 ? x[0] + 1.0 : x[0] - 1.0, x[1]}; };
  e.multiplier = [](const Point& x) { return -std::abs(x[0]); };
  // |T(x) - x| = 1 almost everywhere and mu has unit mass.
  e.optimal_cost = 0.5;
  p.exact = std::move(e);
  return p;
}

}  // namespace detail

inline const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names{"ex1", "ex2", "ex3", "ex4"};
  return names;
}

inline Problem make_problem(std::string_view name) {
  if (name == "ex1") return detail::make_ex1();
  if (name == "ex2") return detail::make_ex2();
  if (name == "ex3") return detail::make_ex3();
  if (name == "ex4") return detail::make_ex4();
  throw std::invalid_argument("make_problem: unknown example '" + std::string(name) +
                              "' (expected ex1, ex2, ex3 or ex4)");
}

/// Richardson extrapolation of the two finest values assuming O(h^2) errors.
inline double reference_cost(std::span<const double> objectives) {
  if (objectives.size() < 2) {
    throw std::invalid_argument("reference_cost: at least two levels are required");
  }
  const double fine = objectives[objectives.size() - 1];
  const double coarse = objectives[objectives.size() - 2];
  return fine + (fine - coarse) / 3.0;
}

/// max_i |reference_i - (computed_i + t)| minimized over the constant t.
inline double gauge_invariant_sup_distance(std::span<const double> reference,
                                           std::span<const double> computed) {
  if (reference.size() != computed.size() || reference.empty()) {
    throw std::invalid_argument("gauge_invariant_sup_distance: size mismatch");
  }
  double lo = reference[0] - computed[0], hi = lo;
  for (std::size_t i = 1; i < reference.size(); ++i) {
    const double r = reference[i] - computed[i];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  // With t* = (hi + lo)/2 the largest deviation is half the spread.
  return 0.5 * (hi - lo);
}

/// ||I_h phi - phi_h||_inf after removing the additive gauge of phi_h.
inline double multiplier_error(std::span<const double> phi_h, const Problem& problem,
                               const Mesh& mesh_x) {
  if (!problem.exact) {
    throw std::invalid_argument("multiplier_error: no exact multiplier for " + problem.name);
  }
  if (phi_h.size() != mesh_x.node_count()) {
    throw std::invalid_argument("multiplier_error: multiplier does not match mesh");
  }
  const auto nodal = interpolate_nodal(mesh_x, problem.exact->multiplier);
  return gauge_invariant_sup_distance(nodal, phi_h);
}

inline double multiplier_error(const TransportSolution& solution, const Problem& problem,
                               const Mesh& mesh_x) {
  return multiplier_error(solution.phi, problem, mesh_x);
}

/// ||I_h phi_{h/2} - phi_h||_inf with the gauge removed, for problems
/// without an exact multiplier.
inline double multiplier_difference(std::span<const double> phi_coarse, const Mesh& coarse,
                                    std::span<const double> phi_fine, const Mesh& fine) {
  const auto map = coarse_node_map(coarse, fine);
  std::vector<double> restricted(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) restricted[i] = phi_fine[map[i]];
  return gauge_invariant_sup_distance(restricted, phi_coarse);
}

}  // namespace mlot
