#pragma once

/// @file measure.hpp
/// @brief Discrete probability measures on mesh nodes.

#include <cstddef>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mlot/mesh.hpp"

namespace mlot {

/// Negative density values above this are rounding noise and get clamped to 0.
inline constexpr double kDensityClampTolerance = 1e-12;

/// Convex combination of Dirac atoms placed at the nodes of a mesh.
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::shared_ptr<const Mesh> mesh, std::vector<double> weights)
      : mesh_(std::move(mesh)), weights_(std::move(weights)) {
    if (!mesh_) throw std::invalid_argument("DiscreteMeasure: null mesh");
    if (weights_.size() != mesh_->node_count()) {
      throw std::invalid_argument("DiscreteMeasure: weight count does not match mesh");
    }
  }

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }

  double total_mass() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::vector<double> weights_;
};

/// Unnormalized atom weights beta_i * density(x_i), i.e. vertex quadrature
/// of <mu, phi_i>.
inline std::vector<double> density_moments(const Mesh& mesh, const ScalarField& density) {
  const auto& beta = mesh.hat_integrals();
  std::vector<double> w(mesh.node_count());
  for (std::size_t i = 0; i < w.size(); ++i) {
    double f = density(mesh.node(i));
    if (f < 0.0) {
      if (f < -kDensityClampTolerance) {
        throw std::domain_error("invalid density: negative value " + std::to_string(f) +
                                " at node " + std::to_string(i));
      }
      f = 0.0;
    }
    w[i] = beta[i] * f;
  }
  return w;
}

/// Adjoint nodal interpolation of the measure with the given density,
/// rescaled to unit mass.
inline DiscreteMeasure discretize_density(std::shared_ptr<const Mesh> mesh,
                                          const ScalarField& density) {
  if (!mesh) throw std::invalid_argument("discretize_density: null mesh");
  std::vector<double> w = density_moments(*mesh, density);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) throw std::domain_error("discretize_density: density has no mass");
  for (auto& v : w) v /= total;
  return DiscreteMeasure(std::move(mesh), std::move(w));
}

/// <measure, u> = sum_i w_i u(x_i).
inline double pair(const DiscreteMeasure& measure, const ScalarField& u) {
  double s = 0.0;
  const auto& nodes = measure.mesh().nodes();
  for (std::size_t i = 0; i < measure.size(); ++i) s += measure[i] * u(nodes[i]);
  return s;
}

}  // namespace mlot
