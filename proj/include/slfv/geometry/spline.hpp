#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "slfv/core/error.hpp"
#include "slfv/geometry/cubic.hpp"

namespace slfv {

enum class Orientation { Positive, Negative };

/// Closed piecewise-cubic Jordan curve. The global parameter s runs over
/// [0, n) with segment floor(s) and local parameter s - floor(s).
struct JordanSplineCurve {
  std::vector<CubicSegment> segments;
  Orientation orientation{Orientation::Positive};
  double max_chord{0.0};  ///< largest distance between adjacent breakpoints
  BoundingBox box;
  std::vector<BoundingBox> segment_boxes;

  int size() const { return static_cast<int>(segments.size()); }

  double wrap(double s) const {
    const double n = static_cast<double>(segments.size());
    s = std::fmod(s, n);
    return s < 0.0 ? s + n : s;
  }
  std::pair<int, double> locate(double s) const {
    s = wrap(s);
    int i = static_cast<int>(std::floor(s));
    if (i >= size()) i = size() - 1;
    return {i, s - i};
  }
  Point2 eval(double s) const {
    const auto [i, l] = locate(s);
    return segments[i].eval(l);
  }
  Vec2 deriv(double s) const {
    const auto [i, l] = locate(s);
    return segments[i].deriv(l);
  }
  double area() const { return signed_area(segments); }

  void finalize() {
    box = BoundingBox{};
    segment_boxes.clear();
    max_chord = 0.0;
    for (const auto& s : segments) {
      segment_boxes.push_back(s.bbox());
      box.expand(segment_boxes.back());
      max_chord = std::max(max_chord, distance(s.start(), s.end()));
    }
  }
};

namespace detail {

inline bool segments_cross(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  return false;
}

inline std::vector<Point2> sample_segment(const CubicSegment& s, int n) {
  std::vector<Point2> pts(n + 1);
  for (int i = 0; i <= n; ++i) pts[i] = s.eval(static_cast<double>(i) / n);
  return pts;
}

inline bool boxes_overlap(const BoundingBox& a, const BoundingBox& b) {
  return a.lo.x <= b.hi.x && b.lo.x <= a.hi.x && a.lo.y <= b.hi.y && b.lo.y <= a.hi.y;
}

// Polyline-sampled intersection test between two segments. When `adjacent`,
// the pieces touching the shared end point are skipped.
inline bool sampled_intersect(const CubicSegment& s, const CubicSegment& t, bool adjacent_end_start,
                              bool adjacent_start_end) {
  constexpr int kSamples = 32;
  const auto ps = sample_segment(s, kSamples);
  const auto pt = sample_segment(t, kSamples);
  for (int i = 0; i < kSamples; ++i)
    for (int j = 0; j < kSamples; ++j) {
      if (adjacent_end_start && i == kSamples - 1 && j == 0) continue;
      if (adjacent_start_end && i == 0 && j == kSamples - 1) continue;
      if (segments_cross(ps[i], ps[i + 1], pt[j], pt[j + 1])) return true;
    }
  return false;
}

}  // namespace detail

/// True if two distinct segments of the curves intersect (ignoring shared
/// end points of consecutive segments of the same curve).
inline bool curves_intersect(const JordanSplineCurve& a, const JordanSplineCurve& b, bool same) {
  const int na = a.size(), nb = b.size();
  for (int i = 0; i < na; ++i)
    for (int j = same ? i + 1 : 0; j < nb; ++j) {
      if (!detail::boxes_overlap(a.segment_boxes[i], b.segment_boxes[j])) continue;
      const bool next = same && j == (i + 1) % na;
      const bool prev = same && i == (j + 1) % nb;
      if (detail::sampled_intersect(a.segments[i], b.segments[j], next, prev)) return true;
    }
  return false;
}

namespace detail {
inline constexpr int kRayAttempts = 16;
inline double ray_angle(int attempt) { return 0.3183098861837907 + attempt * 1.2708704785050974; }
}  // namespace detail

/// Number of crossings of the ray p + r dir (r > 0) with the curve. Sets ok to
/// false when the count is unreliable (breakpoint, tangency, p on the curve).
inline int ray_crossings(const JordanSplineCurve& c, const Point2& p, const Vec2& dir, double scale, bool& ok) {
  const Vec2 nrm{-dir.y, dir.x};
  scale = std::max(scale, c.box.diameter());
  const double tol = 1e-13 * scale;
  if (!c.box.empty() && c.box.distance_to(p) > 0.0) {
    // Quick reject if the whole curve lies behind the ray start.
    bool any_ahead = false;
    for (const Point2 q : {c.box.lo, c.box.hi, Point2{c.box.lo.x, c.box.hi.y}, Point2{c.box.hi.x, c.box.lo.y}})
      any_ahead = any_ahead || dot(q - p, dir) > 0.0;
    if (!any_ahead) return 0;
  }
  int hits = 0;
  for (int i = 0; i < c.size(); ++i) {
    const auto& b = c.segment_boxes[i];
    double smin = std::numeric_limits<double>::infinity(), smax = -smin, fmax = -smin;
    for (const Point2 q : {b.lo, b.hi, Point2{b.lo.x, b.hi.y}, Point2{b.hi.x, b.lo.y}}) {
      const double sd = dot(q - p, nrm);
      smin = std::min(smin, sd);
      smax = std::max(smax, sd);
      fmax = std::max(fmax, dot(q - p, dir));
    }
    if (smin > tol || smax < -tol || fmax < -tol) continue;
    const auto& s = c.segments[i];
    poly::Coeffs f(4);
    for (int k = 0; k < 4; ++k) f[k] = nrm.x * s.cx[k] + nrm.y * s.cy[k];
    f[0] -= dot(p, nrm);
    double fscale = 0.0;
    for (double v : f) fscale = std::max(fscale, std::abs(v));
    fscale = std::max(fscale, scale);
    for (const auto& r : poly::real_roots(f, 0.0, 1.0, 1e-12 * fscale)) {
      const Point2 q = s.eval(r.t);
      const double ahead = dot(q - p, dir);
      if (std::abs(ahead) <= tol) {
        ok = false;  // start point on the boundary
        return 0;
      }
      if (ahead < 0.0) continue;
      if (r.tangent || r.t <= 1e-10 || r.t >= 1.0 - 1e-10) {
        ok = false;
        return 0;
      }
      ++hits;
    }
  }
  return hits;
}

/// Even-odd containment in the region bounded by a single curve.
inline bool curve_encloses(const JordanSplineCurve& c, const Point2& p) {
  if (!c.box.contains(p)) return false;
  for (int attempt = 0; attempt < detail::kRayAttempts; ++attempt) {
    const double theta = detail::ray_angle(attempt);
    bool ok = true;
    const int hits = ray_crossings(c, p, {std::cos(theta), std::sin(theta)}, c.box.diameter(), ok);
    if (ok) return hits % 2 == 1;
  }
  return false;
}

/// Checks closure, nonzero segment lengths, simplicity and orientation sign.
inline void validate_curve(const JordanSplineCurve& c) {
  if (c.size() < 2) throw Error(ErrorCode::InvalidDomain, "curve needs at least two segments");
  const double scale = std::max(c.box.diameter(), 1e-300);
  for (int i = 0; i < c.size(); ++i) {
    const auto& s = c.segments[i];
    if (s.length() <= 1e-14 * scale) throw Error(ErrorCode::InvalidDomain, "zero-length segment");
    if (distance(s.end(), c.segments[(i + 1) % c.size()].start()) > 1e-12 * scale)
      throw Error(ErrorCode::InvalidDomain, "curve is not closed");
  }
  const double a = c.area();
  if ((c.orientation == Orientation::Positive) != (a > 0.0))
    throw Error(ErrorCode::InvalidDomain, "orientation does not match signed area");
  if (curves_intersect(c, c, true)) throw Error(ErrorCode::InvalidDomain, "curve self-intersects");
}

/// Closed polygon through the vertices, one straight segment per edge.
inline JordanSplineCurve polygon_curve(const std::vector<Point2>& pts, Orientation o) {
  JordanSplineCurve c;
  c.orientation = o;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) c.segments.push_back(CubicSegment::line(pts[i], pts[(i + 1) % n]));
  c.finalize();
  return c;
}

/// Periodic C2 cubic spline through the breakpoints with chord-length
/// parametrization, returned as one Hermite segment per breakpoint pair.
inline JordanSplineCurve periodic_spline_curve(const std::vector<Point2>& pts, Orientation o) {
  const int n = static_cast<int>(pts.size());
  if (n < 3) throw Error(ErrorCode::InvalidDomain, "spline curve needs at least three breakpoints");
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) {
    d[i] = distance(pts[i], pts[(i + 1) % n]);
    if (d[i] <= 0.0) throw Error(ErrorCode::InvalidDomain, "repeated breakpoint");
  }
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd rhs(n, 2);
  for (int i = 0; i < n; ++i) {
    const int im = (i + n - 1) % n, ip = (i + 1) % n;
    A(i, im) += 1.0 / d[im];
    A(i, i) += 2.0 * (1.0 / d[im] + 1.0 / d[i]);
    A(i, ip) += 1.0 / d[i];
    const Point2 r = 3.0 * ((pts[ip] - pts[i]) / (d[i] * d[i]) + (pts[i] - pts[im]) / (d[im] * d[im]));
    rhs(i, 0) = r.x;
    rhs(i, 1) = r.y;
  }
  const Eigen::MatrixXd m = A.partialPivLu().solve(rhs);
  JordanSplineCurve c;
  c.orientation = o;
  for (int i = 0; i < n; ++i) {
    const int ip = (i + 1) % n;
    c.segments.push_back(CubicSegment::hermite(pts[i], d[i] * Vec2{m(i, 0), m(i, 1)}, pts[ip],
                                               d[i] * Vec2{m(ip, 0), m(ip, 1)}));
  }
  c.finalize();
  return c;
}

}  // namespace slfv
