#pragma once

/// @file mesh.hpp
/// @brief Structured P1 triangulations of intervals and unions of boxes.
///
/// Every box is covered by a uniform grid of cells of side 2^-level. In 2D
/// each square cell is split into two right triangles along the diagonal from
/// its lower-left to its upper-right corner. Nodes are numbered box by box,
/// and within a box row by row (y outer, x inner). Boxes never share nodes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlot {

/// Spatial point. One-dimensional problems keep the second coordinate at 0.
using Point = std::array<double, 2>;

using ScalarField = std::function<double(const Point&)>;

/// Axis-aligned interval (1D) or rectangle (2D).
struct Box {
  Point lower{0.0, 0.0};
  Point upper{0.0, 0.0};
};

class Domain {
 public:
  Domain() = default;

  Domain(int dimension, std::vector<Box> boxes)
      : dimension_(dimension), boxes_(std::move(boxes)) {
    if (dimension_ != 1 && dimension_ != 2) {
      throw std::invalid_argument("Domain: dimension must be 1 or 2");
    }
    if (boxes_.empty()) {
      throw std::invalid_argument("Domain: at least one box is required");
    }
    for (auto& b : boxes_) {
      if (dimension_ == 1) {
        b.lower[1] = 0.0;
        b.upper[1] = 0.0;
      }
      for (int d = 0; d < dimension_; ++d) {
        if (!(b.upper[d] > b.lower[d])) {
          throw std::invalid_argument("Domain: box with empty extent");
        }
      }
    }
    for (std::size_t a = 0; a < boxes_.size(); ++a) {
      for (std::size_t b = a + 1; b < boxes_.size(); ++b) {
        if (interiors_overlap(boxes_[a], boxes_[b])) {
          throw std::invalid_argument("Domain: boxes overlap");
        }
      }
    }
  }

  static Domain interval(double a, double b) { return Domain(1, {Box{{a, 0.0}, {b, 0.0}}}); }

  static Domain rectangle(double x0, double x1, double y0, double y1) {
    return Domain(2, {Box{{x0, y0}, {x1, y1}}});
  }

  int dimension() const { return dimension_; }
  const std::vector<Box>& boxes() const { return boxes_; }

  double measure() const {
    double total = 0.0;
    for (const auto& b : boxes_) {
      double v = b.upper[0] - b.lower[0];
      if (dimension_ == 2) v *= b.upper[1] - b.lower[1];
      total += v;
    }
    return total;
  }

  friend bool operator==(const Domain& a, const Domain& b) {
    if (a.dimension_ != b.dimension_ || a.boxes_.size() != b.boxes_.size()) return false;
    for (std::size_t k = 0; k < a.boxes_.size(); ++k) {
      if (a.boxes_[k].lower != b.boxes_[k].lower || a.boxes_[k].upper != b.boxes_[k].upper) {
        return false;
      }
    }
    return true;
  }

 private:
  bool interiors_overlap(const Box& a, const Box& b) const {
    for (int d = 0; d < dimension_; ++d) {
      if (a.upper[d] <= b.lower[d] || b.upper[d] <= a.lower[d]) return false;
    }
    return true;
  }

  int dimension_ = 1;
  std::vector<Box> boxes_;
};

/// Uniform grid covering one box of a Domain.
struct BoxGrid {
  Point lower{0.0, 0.0};
  int cells_x = 0;
  int cells_y = 0;  // 0 in 1D
  std::size_t first_node = 0;

  int nodes_x() const { return cells_x + 1; }
  int nodes_y() const { return cells_y + 1; }
  std::size_t node_count() const {
    return static_cast<std::size_t>(nodes_x()) * static_cast<std::size_t>(nodes_y());
  }
  std::size_t node(int ix, int iy) const {
    return first_node + static_cast<std::size_t>(iy) * static_cast<std::size_t>(nodes_x()) +
           static_cast<std::size_t>(ix);
  }
};

class Mesh {
 public:
  using Element = std::array<std::size_t, 3>;  // third index unused in 1D

  const Domain& domain() const { return domain_; }
  int dimension() const { return domain_.dimension(); }
  int level() const { return level_; }
  /// Side length of the grid cells.
  double cell_size() const { return cell_size_; }
  /// Maximal element diameter.
  double h() const { return dimension() == 1 ? cell_size_ : std::sqrt(2.0) * cell_size_; }

  std::size_t node_count() const { return nodes_.size(); }
  const std::vector<Point>& nodes() const { return nodes_; }
  const Point& node(std::size_t i) const { return nodes_[i]; }
  const std::vector<Element>& elements() const { return elements_; }
  const std::vector<BoxGrid>& grids() const { return grids_; }
  /// beta_z: integral of the hat function of node z.
  const std::vector<double>& hat_integrals() const { return hat_integrals_; }

  friend Mesh build_mesh(const Domain& domain, int level);

 private:
  Domain domain_;
  int level_ = 0;
  double cell_size_ = 1.0;
  std::vector<Point> nodes_;
  std::vector<Element> elements_;
  std::vector<BoxGrid> grids_;
  std::vector<double> hat_integrals_;
};

namespace detail {

inline int cells_along(double length, double cell, const char* what) {
  const double ratio = length / cell;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw std::invalid_argument(std::string("build_mesh: box ") + what +
                                " is not a multiple of the cell size");
  }
  return static_cast<int>(rounded);
}

}  // namespace detail

/// Builds the uniform triangulation with cell side 2^-level.
inline Mesh build_mesh(const Domain& domain, int level) {
  if (level < 0) throw std::invalid_argument("build_mesh: negative level");
  if (level > 30) throw std::invalid_argument("build_mesh: level too large");

  Mesh mesh;
  mesh.domain_ = domain;
  mesh.level_ = level;
  mesh.cell_size_ = std::ldexp(1.0, -level);
  const double h = mesh.cell_size_;
  const bool two_d = domain.dimension() == 2;

  std::size_t offset = 0;
  for (const auto& box : domain.boxes()) {
    BoxGrid g;
    g.lower = box.lower;
    g.cells_x = detail::cells_along(box.upper[0] - box.lower[0], h, "width");
    g.cells_y = two_d ? detail::cells_along(box.upper[1] - box.lower[1], h, "height") : 0;
    g.first_node = offset;
    offset += g.node_count();
    mesh.grids_.push_back(g);
  }

  mesh.nodes_.reserve(offset);
  mesh.hat_integrals_.assign(offset, 0.0);
  for (const auto& g : mesh.grids_) {
    for (int iy = 0; iy < g.nodes_y(); ++iy) {
      for (int ix = 0; ix < g.nodes_x(); ++ix) {
        mesh.nodes_.push_back(Point{g.lower[0] + ix * h, two_d ? g.lower[1] + iy * h : 0.0});
      }
    }
    if (!two_d) {
      for (int ix = 0; ix < g.cells_x; ++ix) {
        const std::size_t a = g.node(ix, 0), b = g.node(ix + 1, 0);
        mesh.elements_.push_back({a, b, 0});
        mesh.hat_integrals_[a] += 0.5 * h;
        mesh.hat_integrals_[b] += 0.5 * h;
      }
      continue;
    }
    const double third_area = h * h / 6.0;
    for (int iy = 0; iy < g.cells_y; ++iy) {
      for (int ix = 0; ix < g.cells_x; ++ix) {
        const std::size_t ll = g.node(ix, iy), lr = g.node(ix + 1, iy);
        const std::size_t ul = g.node(ix, iy + 1), ur = g.node(ix + 1, iy + 1);
        mesh.elements_.push_back({ll, lr, ur});
        mesh.elements_.push_back({ll, ur, ul});
        for (std::size_t z : {ll, lr, ur, ll, ur, ul}) mesh.hat_integrals_[z] += third_area;
      }
    }
  }
  return mesh;
}

inline Mesh refine(const Mesh& mesh) { return build_mesh(mesh.domain(), mesh.level() + 1); }

inline bool is_refinement_of(const Mesh& coarse, const Mesh& fine) {
  return fine.level() == coarse.level() + 1 && fine.domain() == coarse.domain() &&
         fine.grids().size() == coarse.grids().size();
}

/// Index of every coarse node within the refined mesh.
inline std::vector<std::size_t> coarse_node_map(const Mesh& coarse, const Mesh& fine) {
  if (!is_refinement_of(coarse, fine)) {
    throw std::invalid_argument("coarse_node_map: fine mesh is not a refinement of coarse mesh");
  }
  std::vector<std::size_t> map(coarse.node_count());
  for (std::size_t b = 0; b < coarse.grids().size(); ++b) {
    const auto& cg = coarse.grids()[b];
    const auto& fg = fine.grids()[b];
    for (int iy = 0; iy < cg.nodes_y(); ++iy) {
      for (int ix = 0; ix < cg.nodes_x(); ++ix) map[cg.node(ix, iy)] = fg.node(2 * ix, 2 * iy);
    }
  }
  return map;
}

/// Nodal values on `fine` of the P1 function with coefficients `values` on `coarse`.
inline std::vector<double> prolongate(const Mesh& coarse, const Mesh& fine,
                                      const std::vector<double>& values) {
  if (!is_refinement_of(coarse, fine)) {
    throw std::invalid_argument("prolongate: fine mesh is not a refinement of coarse mesh");
  }
  if (values.size() != coarse.node_count()) {
    throw std::invalid_argument("prolongate: value count does not match coarse mesh");
  }
  std::vector<double> out(fine.node_count());
  for (std::size_t b = 0; b < fine.grids().size(); ++b) {
    const auto& cg = coarse.grids()[b];
    const auto& fg = fine.grids()[b];
    auto cv = [&](int cx, int cy) { return values[cg.node(cx, cy)]; };
    for (int fy = 0; fy < fg.nodes_y(); ++fy) {
      for (int fx = 0; fx < fg.nodes_x(); ++fx) {
        const int cx = fx / 2, cy = fy / 2;
        const bool odd_x = fx % 2 != 0, odd_y = fy % 2 != 0;
        double v;
        if (!odd_x && !odd_y) {
          v = cv(cx, cy);
        } else if (odd_x && !odd_y) {
          v = 0.5 * (cv(cx, cy) + cv(cx + 1, cy));
        } else if (!odd_x && odd_y) {
          v = 0.5 * (cv(cx, cy) + cv(cx, cy + 1));
        } else {
          // midpoint of the lower-left to upper-right diagonal
          v = 0.5 * (cv(cx, cy) + cv(cx + 1, cy + 1));
        }
        out[fg.node(fx, fy)] = v;
      }
    }
  }
  return out;
}

/// Coefficients of the nodal interpolant I_h f.
inline std::vector<double> interpolate_nodal(const Mesh& mesh, const ScalarField& f) {
  std::vector<double> out;
  out.reserve(mesh.node_count());
  for (const auto& z : mesh.nodes()) out.push_back(f(z));
  return out;
}

/// Debug dump: `node x [y]` and `element i j [k]` lines.
inline void write_mesh(std::ostream& os, const Mesh& mesh) {
  const bool two_d = mesh.dimension() == 2;
  const auto old_precision = os.precision(17);
  for (const auto& z : mesh.nodes()) {
    os << "node " << z[0];
    if (two_d) os << ' ' << z[1];
    os << '\n';
  }
  for (const auto& e : mesh.elements()) {
    os << "element " << e[0] << ' ' << e[1];
    if (two_d) os << ' ' << e[2];
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace mlot
