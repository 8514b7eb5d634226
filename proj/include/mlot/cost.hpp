#pragma once

/// @file cost.hpp
/// @brief Transport cost functions c(x, y).

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

#include "mlot/mesh.hpp"

namespace mlot {

class CostFunction {
 public:
  using Callback = std::function<double(const Point&, const Point&)>;

  /// c_p(x, y) = |x - y|^p / p.
  static CostFunction power(double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("CostFunction: exponent must be >= 1");
    CostFunction c;
    c.p_ = p;
    if (p == 2.0) {
      c.kind_ = Kind::kQuadratic;
    } else if (p == 3.0) {
      c.kind_ = Kind::kCubic;
    } else if (p == 1.0) {
      c.kind_ = Kind::kLinear;
    } else {
      c.kind_ = Kind::kPower;
    }
    return c;
  }

  static CostFunction custom(Callback fn) {
    if (!fn) throw std::invalid_argument("CostFunction: empty callback");
    CostFunction c;
    c.kind_ = Kind::kCustom;
    c.custom_ = std::move(fn);
    return c;
  }

  bool is_power() const { return kind_ != Kind::kCustom; }
  /// Exponent of a power cost; 0 for custom costs.
  double exponent() const { return is_power() ? p_ : 0.0; }

  /// Holder exponent alpha = min(1, p - 1) of the first derivative.
  double regularity() const { return is_power() ? std::min(1.0, p_ - 1.0) : 0.0; }

  double operator()(const Point& x, const Point& y) const {
    const double dx = x[0] - y[0];
    const double dy = x[1] - y[1];
    const double d2 = dx * dx + dy * dy;
    switch (kind_) {
      case Kind::kQuadratic:
        return 0.5 * d2;
      case Kind::kCubic:
        return d2 * std::sqrt(d2) / 3.0;
      case Kind::kLinear:
        return std::sqrt(d2);
      case Kind::kPower:
        return std::pow(d2, 0.5 * p_) / p_;
      case Kind::kCustom:
        break;
    }
    return custom_(x, y);
  }

 private:
  enum class Kind { kQuadratic, kCubic, kLinear, kPower, kCustom };

  CostFunction() = default;

  Kind kind_ = Kind::kQuadratic;
  double p_ = 2.0;
  Callback custom_;
};

}  // namespace mlot
