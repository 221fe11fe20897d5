#pragma once

#include <algorithm>
#include <boost/math/interpolators/makima.hpp>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "slfv/core/error.hpp"
#include "slfv/solver/problem.hpp"

namespace slfv {

/// Time step rule of a benchmark: k = k_over_h * h or the CFL rule.
struct StepRule {
  double k_over_h{0.0};
  double cfl{0.0};
};

/// A named test problem with its default discretization parameters.
struct BenchmarkCase {
  std::string id;
  ProblemSpec spec;
  std::optional<ScalarField> exact;  ///< exact solution; Richardson errors otherwise
  StepRule step;
  /// Physical length of one grid unit: grid "N" means h = length_unit / N.
  double length_unit{1.0};
  /// Factor applied to cell volumes in L1/L2 norms.
  double volume_scale{1.0};

  double h_for(int n) const { return length_unit / n; }
  bool has_exact() const { return exact.has_value(); }
};

/// Smooth time coefficient given by breakpoints, interpolated by a
/// modified-Akima cubic and held constant outside the table.
class CoefficientTable {
 public:
  CoefficientTable(std::vector<double> t, std::vector<double> v) : t0_(t.front()), t1_(t.back()) {
    if (t.size() != v.size() || t.size() < 4)
      throw Error(ErrorCode::InvalidArgument, "coefficient table needs at least 4 matching breakpoints");
    if (!std::is_sorted(t.begin(), t.end()) || std::adjacent_find(t.begin(), t.end()) != t.end())
      throw Error(ErrorCode::InvalidArgument, "coefficient table times must increase strictly");
    spline_ = std::make_shared<Spline>(std::move(t), std::move(v));
  }
  double operator()(double t) const { return (*spline_)(std::clamp(t, t0_, t1_)); }

 private:
  using Spline = boost::math::interpolators::makima<std::vector<double>>;
  double t0_, t1_;
  std::shared_ptr<Spline> spline_;
};

namespace cases {

inline constexpr double pi = std::numbers::pi;

/// Unit box, no-penetration solenoidal swirl with sin(t) amplitude.
inline BenchmarkCase swirl() {
  BenchmarkCase c;
  c.id = "swirl";
  c.spec.domain_kind = DomainKind::Rectangle;
  c.spec.box_lo = {0.0, 0.0};
  c.spec.box_hi = {1.0, 1.0};
  c.spec.velocity.fn = [](const Point2& p, double t) {
    const double sx = std::sin(pi * p.x), cx = std::cos(pi * p.x);
    const double sy = std::sin(pi * p.y), cy = std::cos(pi * p.y);
    const double a = std::sin(t);
    return Vec2{-sx * sx * sy * cy * a, sx * cx * sy * sy * a};
  };
  c.spec.velocity.max_speed = 0.5;
  auto linear = ScalarField{[](const Point2& p, double) { return p.x + p.y; }, false};
  c.spec.initial = linear;
  c.spec.boundary = linear;
  c.spec.final_time = 1.0;
  c.step.k_over_h = 8.0;
  return c;
}

/// Trapezoid with a compressible inflow velocity and a manufactured source;
/// exact solution sin(x + y + t).
inline BenchmarkCase trapezoid() {
  BenchmarkCase c;
  c.id = "trapezoid";
  c.spec.domain_kind = DomainKind::Splinegon;
  c.spec.splinegon = std::make_shared<SplinegonDomain>(std::vector<JordanSplineCurve>{
      polygon_curve({{0.5, 0.0}, {2.0, 0.0}, {2.0, 2.0}, {0.0, 2.0}}, Orientation::Positive)});
  c.spec.box_lo = {0.0, 0.0};
  c.spec.box_hi = {2.0, 2.0};
  c.spec.velocity.fn = [](const Point2& p, double t) {
    return Vec2{p.x * p.x + p.y * p.y + t, p.x + p.y - 2.0 * t};
  };
  c.spec.velocity.max_speed = std::hypot(9.0, 4.0);
  c.spec.source = ScalarField{[](const Point2& p, double t) {
                                return std::cos(p.x + p.y + t) * (1.0 + p.x * p.x + p.y * p.y + p.x + p.y - t);
                              },
                              false};
  auto sol = ScalarField{[](const Point2& p, double t) { return std::sin(p.x + p.y + t); }, false};
  c.spec.initial = sol;
  c.spec.boundary = sol;
  c.exact = sol;
  c.spec.final_time = 1.0;
  c.step.k_over_h = 8.0;
  return c;
}

/// Solid-body rotation of a Gaussian on the periodic box (-pi, pi)^2.
/// Grid "N" has N cells per side; norms measure volumes in units of the box.
inline BenchmarkCase rotation() {
  BenchmarkCase c;
  c.id = "rotation";
  c.spec.domain_kind = DomainKind::PeriodicRectangle;
  c.spec.box_lo = {-pi, -pi};
  c.spec.box_hi = {pi, pi};
  c.spec.velocity.fn = [](const Point2& p, double) { return Vec2{-p.y, p.x}; };
  c.spec.velocity.max_speed = pi * std::numbers::sqrt2;
  c.spec.speed_sum = 2.0 * pi;
  auto sol = ScalarField{[](const Point2& p, double) { return std::exp(-3.0 * (p.x * p.x + p.y * p.y)); }, false};
  c.spec.initial = sol;
  c.exact = sol;
  c.spec.final_time = 0.5;
  c.step.cfl = 8.0;
  c.length_unit = 2.0 * pi;
  c.volume_scale = 1.0 / (4.0 * pi * pi);
  return c;
}

/// Cellular velocity fields of the mixing problem.
inline Vec2 mixing_u1(const Point2& p) {
  return {-std::sin(2 * pi * p.x) * std::cos(2 * pi * p.y), std::cos(2 * pi * p.x) * std::sin(2 * pi * p.y)};
}
inline Vec2 mixing_u2(const Point2& p) { return mixing_u1({p.x - 0.25, p.y - 0.25}); }

/// Transient mixing on the periodic unit box with u = a1(t) u1 + a2(t) u2.
/// Without tables the coefficients are cos^2(pi t) and sin^2(pi t).
inline BenchmarkCase mixing(std::function<double(double)> a1 = {}, std::function<double(double)> a2 = {}) {
  if (!a1) a1 = [](double t) { return std::pow(std::cos(pi * t), 2); };
  if (!a2) a2 = [](double t) { return std::pow(std::sin(pi * t), 2); };
  BenchmarkCase c;
  c.id = "mixing";
  c.spec.domain_kind = DomainKind::PeriodicRectangle;
  c.spec.box_lo = {0.0, 0.0};
  c.spec.box_hi = {1.0, 1.0};
  c.spec.velocity.fn = [a1, a2](const Point2& p, double t) { return a1(t) * mixing_u1(p) + a2(t) * mixing_u2(p); };
  c.spec.initial = ScalarField{[](const Point2& p, double) { return std::sin(2 * pi * p.y); }, false};
  c.spec.final_time = 0.1;
  c.step.k_over_h = 0.4;
  return c;
}

}  // namespace cases

inline const std::vector<std::string>& case_ids() {
  static const std::vector<std::string> ids{"swirl", "trapezoid", "rotation", "mixing", "custom"};
  return ids;
}

/// Built-in benchmark by id. "custom" has no built-in definition and must
/// come from a config file.
inline BenchmarkCase case_library(const std::string& id) {
  if (id == "swirl") return cases::swirl();
  if (id == "trapezoid") return cases::trapezoid();
  if (id == "rotation") return cases::rotation();
  if (id == "mixing") return cases::mixing();
  if (id == "custom") throw Error(ErrorCode::UnknownCase, "case 'custom' is defined by a config file");
  throw Error(ErrorCode::UnknownCase, "unknown case '" + id + "'");
}

}  // namespace slfv
