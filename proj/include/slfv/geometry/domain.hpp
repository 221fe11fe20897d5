#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "slfv/core/error.hpp"
#include "slfv/geometry/spline.hpp"

namespace slfv {

/// Region bounded by one positively oriented outer curve and any number of
/// negatively oriented holes. curves[0] is the outer curve.
class SplinegonDomain {
 public:
  SplinegonDomain() = default;

  explicit SplinegonDomain(std::vector<JordanSplineCurve> curves) : curves_(std::move(curves)) {
    if (curves_.empty()) throw Error(ErrorCode::InvalidDomain, "domain needs an outer curve");
    if (curves_[0].orientation != Orientation::Positive)
      throw Error(ErrorCode::InvalidDomain, "outer curve must be positively oriented");
    for (std::size_t i = 1; i < curves_.size(); ++i)
      if (curves_[i].orientation != Orientation::Negative)
        throw Error(ErrorCode::InvalidDomain, "hole curves must be negatively oriented");
    for (const auto& c : curves_) validate_curve(c);
    box_ = curves_[0].box;
    for (std::size_t i = 0; i < curves_.size(); ++i)
      for (std::size_t j = i + 1; j < curves_.size(); ++j)
        if (curves_intersect(curves_[i], curves_[j], false))
          throw Error(ErrorCode::InvalidDomain, "boundary curves intersect");
    for (std::size_t i = 1; i < curves_.size(); ++i) {
      const Point2 p = curves_[i].segments[0].start();
      if (!inside_curve(curves_[0], p)) throw Error(ErrorCode::InvalidDomain, "hole outside the outer curve");
      for (std::size_t j = 1; j < curves_.size(); ++j)
        if (j != i && inside_curve(curves_[j], p)) throw Error(ErrorCode::InvalidDomain, "nested holes");
    }
  }

  const std::vector<JordanSplineCurve>& curves() const { return curves_; }
  const JordanSplineCurve& outer() const { return curves_[0]; }
  const BoundingBox& bbox() const { return box_; }
  double diameter() const { return box_.diameter(); }

  double area() const {
    double a = 0.0;
    for (const auto& c : curves_) a += c.area();
    return a;
  }

  /// Even-odd ray test against all boundary curves. Rays that graze a
  /// breakpoint, touch tangentially or start on the boundary are recast in
  /// the next direction of a fixed sequence.
  bool contains(const Point2& p) const {
    if (!box_.contains(p)) return false;
    int parity = 0;
    for (int attempt = 0; attempt < detail::kRayAttempts; ++attempt) {
      const double theta = detail::ray_angle(attempt);
      const Vec2 dir{std::cos(theta), std::sin(theta)};
      const double scale = box_.diameter();
      bool ok = true;
      parity = 0;
      for (const auto& c : curves_) {
        const int hits = ray_crossings(c, p, dir, scale, ok);
        if (!ok) break;
        parity += hits;
      }
      if (ok) return parity % 2 == 1;
    }
    return parity % 2 == 1;
  }

  static bool inside_curve(const JordanSplineCurve& c, const Point2& p) { return curve_encloses(c, p); }

 private:
  std::vector<JordanSplineCurve> curves_;
  BoundingBox box_;
};

/// Location on the boundary: curve index, segment, local parameter.
struct BoundaryPoint {
  int curve{-1};
  int segment{-1};
  double l{0.0};
  Point2 point;
  double distance{std::numeric_limits<double>::infinity()};

  double s() const { return segment + l; }
};

/// Global closest point on the domain boundary, by exact minimization of the
/// squared distance on each segment.
inline BoundaryPoint closest_boundary_point(const SplinegonDomain& dom, const Point2& p) {
  BoundaryPoint best;
  for (int ci = 0; ci < static_cast<int>(dom.curves().size()); ++ci) {
    const auto& c = dom.curves()[ci];
    for (int i = 0; i < c.size(); ++i) {
      if (c.segment_boxes[i].distance_to(p) > best.distance) continue;
      const auto& s = c.segments[i];
      poly::Coeffs gx = s.x_poly(), gy = s.y_poly();
      gx[0] -= p.x;
      gy[0] -= p.y;
      const auto g = poly::add(poly::multiply(gx, poly::derivative(gx)), poly::multiply(gy, poly::derivative(gy)));
      std::vector<double> cand{0.0, 1.0};
      for (const auto& r : poly::real_roots(g, 0.0, 1.0)) cand.push_back(r.t);
      for (double l : cand) {
        const Point2 q = s.eval(l);
        const double d = distance(p, q);
        if (d < best.distance) best = {ci, i, l, q, d};
      }
    }
  }
  return best;
}

/// Parses the plain-text domain format:
///   splinegon <n_curves>
///   curve <+|-> <n_breakpoints> [spline|polygon]
///   x y            (one line per breakpoint)
/// Lines starting with '#' are ignored.
inline SplinegonDomain read_domain(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    for (std::string t; ls >> t;) tokens.push_back(t);
  }
  std::size_t pos = 0;
  auto next = [&]() -> const std::string& {
    if (pos >= tokens.size()) throw Error(ErrorCode::ParseError, "unexpected end of domain file");
    return tokens[pos++];
  };
  auto number = [&]() {
    const std::string& t = next();
    try {
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "expected a number, got '" + t + "'");
    }
  };
  if (next() != "splinegon") throw Error(ErrorCode::ParseError, "domain file must start with 'splinegon'");
  const int ncurves = static_cast<int>(number());
  if (ncurves < 1) throw Error(ErrorCode::ParseError, "domain needs at least one curve");
  std::vector<JordanSplineCurve> curves;
  for (int ci = 0; ci < ncurves; ++ci) {
    if (next() != "curve") throw Error(ErrorCode::ParseError, "expected 'curve'");
    const std::string& sign = next();
    if (sign != "+" && sign != "-") throw Error(ErrorCode::ParseError, "curve orientation must be + or -");
    const Orientation o = sign == "+" ? Orientation::Positive : Orientation::Negative;
    const int n = static_cast<int>(number());
    bool poly_mode = false;
    if (pos < tokens.size() && (tokens[pos] == "spline" || tokens[pos] == "polygon")) poly_mode = next() == "polygon";
    std::vector<Point2> pts(n);
    for (auto& p : pts) {
      p.x = number();
      p.y = number();
    }
    curves.push_back(poly_mode ? polygon_curve(pts, o) : periodic_spline_curve(pts, o));
  }
  if (pos != tokens.size()) throw Error(ErrorCode::ParseError, "trailing tokens in domain file");
  return SplinegonDomain(std::move(curves));
}

inline SplinegonDomain read_domain_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open domain file " + path);
  return read_domain(in);
}

inline SplinegonDomain rectangle_domain(const Point2& lo, const Point2& hi) {
  return SplinegonDomain({polygon_curve({lo, {hi.x, lo.y}, hi, {lo.x, hi.y}}, Orientation::Positive)});
}

}  // namespace slfv
