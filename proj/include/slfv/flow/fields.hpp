#pragma once

#include <functional>

#include "slfv/core/point.hpp"

namespace slfv {

/// Time-dependent velocity u(x, t).
struct VelocityField {
  std::function<Vec2(const Point2&, double)> fn;
  double max_speed{0.0};  ///< bound on |u| used for substep counts; 0 if unknown
  bool is_zero{false};

  Vec2 operator()(const Point2& p, double t) const { return is_zero ? Vec2{} : fn(p, t); }

  static VelocityField zero() { return {[](const Point2&, double) { return Vec2{}; }, 0.0, true}; }
};

/// Scalar field f(x, t), used for sources, initial and boundary data.
struct ScalarField {
  std::function<double(const Point2&, double)> fn;
  bool is_zero{false};

  double operator()(const Point2& p, double t) const { return is_zero ? 0.0 : fn(p, t); }

  static ScalarField zero() { return {[](const Point2&, double) { return 0.0; }, true}; }
  static ScalarField constant(double c) {
    if (c == 0.0) return zero();
    return {[c](const Point2&, double) { return c; }, false};
  }
};

using SourceField = ScalarField;
using BoundaryConditionField = ScalarField;

}  // namespace slfv
