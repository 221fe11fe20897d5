#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "slfv/core/point.hpp"
#include "slfv/core/poly.hpp"

namespace slfv {

/// Planar polynomial curve of degree <= 3 on l in [0, 1], stored in the
/// power basis: x(l) = cx[0] + cx[1] l + cx[2] l^2 + cx[3] l^3.
struct CubicSegment {
  std::array<double, 4> cx{};
  std::array<double, 4> cy{};

  static CubicSegment line(const Point2& a, const Point2& b) {
    CubicSegment s;
    s.cx = {a.x, b.x - a.x, 0.0, 0.0};
    s.cy = {a.y, b.y - a.y, 0.0, 0.0};
    return s;
  }

  /// Hermite cubic from end points and end derivatives (w.r.t. l).
  static CubicSegment hermite(const Point2& p0, const Vec2& d0, const Point2& p1, const Vec2& d1) {
    CubicSegment s;
    auto fill = [](std::array<double, 4>& c, double a, double da, double b, double db) {
      c[0] = a;
      c[1] = da;
      c[2] = 3.0 * (b - a) - 2.0 * da - db;
      c[3] = 2.0 * (a - b) + da + db;
    };
    fill(s.cx, p0.x, d0.x, p1.x, d1.x);
    fill(s.cy, p0.y, d0.y, p1.y, d1.y);
    return s;
  }

  Point2 eval(double l) const {
    return {((cx[3] * l + cx[2]) * l + cx[1]) * l + cx[0], ((cy[3] * l + cy[2]) * l + cy[1]) * l + cy[0]};
  }
  Vec2 deriv(double l) const {
    return {(3.0 * cx[3] * l + 2.0 * cx[2]) * l + cx[1], (3.0 * cy[3] * l + 2.0 * cy[2]) * l + cy[1]};
  }
  Vec2 deriv2(double l) const { return {6.0 * cx[3] * l + 2.0 * cx[2], 6.0 * cy[3] * l + 2.0 * cy[2]}; }

  Point2 start() const { return {cx[0], cy[0]}; }
  Point2 end() const { return {cx[0] + cx[1] + cx[2] + cx[3], cy[0] + cy[1] + cy[2] + cy[3]}; }

  poly::Coeffs x_poly() const { return {cx.begin(), cx.end()}; }
  poly::Coeffs y_poly() const { return {cy.begin(), cy.end()}; }

  /// Restriction to [l0, l1], reparametrized to [0, 1].
  CubicSegment sub(double l0, double l1) const {
    const double d = l1 - l0;
    auto shift = [&](const std::array<double, 4>& c) {
      // Taylor expansion about l0, then scale by d.
      std::array<double, 4> r{};
      r[0] = ((c[3] * l0 + c[2]) * l0 + c[1]) * l0 + c[0];
      r[1] = ((3.0 * c[3] * l0 + 2.0 * c[2]) * l0 + c[1]) * d;
      r[2] = (3.0 * c[3] * l0 + c[2]) * d * d;
      r[3] = c[3] * d * d * d;
      return r;
    };
    CubicSegment s;
    s.cx = shift(cx);
    s.cy = shift(cy);
    return s;
  }

  CubicSegment reversed() const { return sub(1.0, 0.0); }

  /// Adds a linear correction so the end points become exactly a and b.
  CubicSegment with_endpoints(const Point2& a, const Point2& b) const {
    CubicSegment s = *this;
    const Point2 da = a - start();
    const Point2 db = b - end();
    s.cx[0] += da.x;
    s.cy[0] += da.y;
    s.cx[1] += db.x - da.x;
    s.cy[1] += db.y - da.y;
    return s;
  }

  bool is_line(double tol = 0.0) const {
    const double scale = std::abs(cx[1]) + std::abs(cy[1]) + 1e-300;
    return std::abs(cx[2]) + std::abs(cx[3]) + std::abs(cy[2]) + std::abs(cy[3]) <= tol * scale;
  }

  /// Exact integral of x dy along the segment (Green's theorem area term).
  double x_dy() const {
    // x(l) y'(l) is a degree-5 polynomial; integrate coefficient-wise.
    const std::array<double, 3> dy{cy[1], 2.0 * cy[2], 3.0 * cy[3]};
    double s = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 3; ++j) s += cx[i] * dy[j] / static_cast<double>(i + j + 1);
    return s;
  }

  /// Arc length by 16-point Gauss-Legendre on [0, 1].
  double length() const;

  BoundingBox bbox() const {
    BoundingBox b;
    b.expand(start());
    b.expand(end());
    for (const auto* c : {&cx, &cy})
      for (const auto& r : poly::real_roots({(*c)[1], 2.0 * (*c)[2], 3.0 * (*c)[3]}, 0.0, 1.0)) b.expand(eval(r.t));
    return b;
  }
};

namespace detail {
inline constexpr std::array<double, 8> kGl16Nodes{0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                                  0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                                  0.9445750230732326, 0.9894009349916499};
inline constexpr std::array<double, 8> kGl16Weights{0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                                    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                                    0.0622535239386479, 0.0271524594117541};
}  // namespace detail

inline double CubicSegment::length() const {
  double s = 0.0;
  for (std::size_t i = 0; i < detail::kGl16Nodes.size(); ++i) {
    const double a = 0.5 * (1.0 - detail::kGl16Nodes[i]);
    const double b = 0.5 * (1.0 + detail::kGl16Nodes[i]);
    s += detail::kGl16Weights[i] * (norm(deriv(a)) + norm(deriv(b)));
  }
  return 0.5 * s;
}

/// Exact Green's-theorem area of a closed loop of segments (positive for CCW).
inline double signed_area(const std::vector<CubicSegment>& loop) {
  double a = 0.0;
  for (const auto& s : loop) a += s.x_dy();
  return a;
}

}  // namespace slfv
