#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "slfv/core/error.hpp"
#include "slfv/geometry/spline.hpp"

namespace slfv {

/// Curved quadrilateral (or triangle with the fourth vertex collapsed onto
/// the first) bounded by cubic edges e[k] running from v[k] to v[k+1].
/// The blending map sends [-1,1]^2 onto the patch, reproducing all edges.
struct CurvedPatch {
  enum class Kind { Quad, Triangle };
  Kind kind{Kind::Quad};
  std::array<Point2, 4> v{};
  std::array<CubicSegment, 4> e{};

  static CurvedPatch quad(const std::array<CubicSegment, 4>& edges) {
    CurvedPatch p;
    p.kind = Kind::Quad;
    p.e = edges;
    for (int k = 0; k < 4; ++k) p.v[k] = edges[k].start();
    return p;
  }

  /// Triangle a -> b -> c -> a; the blending map collapses xi = -1 onto a.
  static CurvedPatch triangle(const CubicSegment& ab, const CubicSegment& bc, const CubicSegment& ca) {
    CurvedPatch p;
    p.kind = Kind::Triangle;
    const Point2 a = ab.start();
    p.v = {a, bc.start(), ca.start(), a};
    CubicSegment pointy;
    pointy.cx = {a.x, 0, 0, 0};
    pointy.cy = {a.y, 0, 0, 0};
    p.e = {ab, bc, ca, pointy};
    return p;
  }

  /// Blending map M(xi, eta) with Jacobian columns.
  void map(double xi, double eta, Point2& m, Vec2& m_xi, Vec2& m_eta) const {
    const double lx = 0.5 * (xi + 1.0), ly = 0.5 * (eta + 1.0);
    const Point2 E1 = e[0].eval(lx), E2 = e[1].eval(ly), E3 = e[2].eval(1.0 - lx), E4 = e[3].eval(1.0 - ly);
    const Vec2 dE1 = 0.5 * e[0].deriv(lx), dE2 = 0.5 * e[1].deriv(ly);
    const Vec2 dE3 = -0.5 * e[2].deriv(1.0 - lx), dE4 = -0.5 * e[3].deriv(1.0 - ly);
    const double a = 1.0 - xi, b = 1.0 + xi, c = 1.0 - eta, d = 1.0 + eta;
    m = 0.5 * (c * E1 + b * E2 + d * E3 + a * E4) - 0.25 * (a * c * v[0] + b * c * v[1] + b * d * v[2] + a * d * v[3]);
    m_xi = 0.5 * (c * dE1 + E2 + d * dE3 - E4) - 0.25 * (-c * v[0] + c * v[1] + d * v[2] - d * v[3]);
    m_eta = 0.5 * (-1.0 * E1 + b * dE2 + E3 + a * dE4) - 0.25 * (-a * v[0] - b * v[1] + b * v[2] + a * v[3]);
  }

  Point2 eval(double xi, double eta) const {
    Point2 m;
    Vec2 a, b;
    map(xi, eta, m, a, b);
    return m;
  }

  double jacobian(double xi, double eta) const {
    Point2 m;
    Vec2 a, b;
    map(xi, eta, m, a, b);
    return cross(a, b);
  }

  /// Exact area from the boundary edges (Green's theorem).
  double area() const {
    double s = 0.0;
    const int ne = kind == Kind::Quad ? 4 : 3;
    for (int k = 0; k < ne; ++k) s += e[k].x_dy();
    return s;
  }

  /// Smallest Jacobian determinant over a uniform sample of the closed
  /// square, edges included except a triangle's collapsed edge xi = -1.
  double min_jacobian(int n = 32) const {
    double mn = std::numeric_limits<double>::infinity();
    for (int i = kind == Kind::Triangle ? 1 : 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) mn = std::min(mn, jacobian(-1.0 + 2.0 * i / n, -1.0 + 2.0 * j / n));
    return mn;
  }
};

namespace detail {

inline JordanSplineCurve loop_curve(const std::vector<CubicSegment>& loop) {
  JordanSplineCurve c;
  c.segments = loop;
  c.finalize();
  return c;
}

inline bool chord_crosses_loop(const Point2& a, const Point2& b, const std::vector<CubicSegment>& loop,
                               std::size_t skip_a, std::size_t skip_b) {
  constexpr int kSamples = 32;
  for (std::size_t k = 0; k < loop.size(); ++k) {
    const auto pts = sample_segment(loop[k], kSamples);
    for (int i = 0; i < kSamples; ++i) {
      // Pieces touching the chord's loop vertex are allowed to meet it there.
      if ((k == skip_a && i == 0) || (k == skip_b && i == kSamples - 1)) continue;
      if (segments_cross(a, b, pts[i], pts[i + 1])) return true;
    }
  }
  return false;
}

inline bool patches_valid(const std::vector<CurvedPatch>& ps, double area) {
  double sum = 0.0;
  for (const auto& p : ps) {
    const double pa = p.area();
    if (!(pa > 0.0) || p.min_jacobian() <= 1e-14 * pa) return false;
    sum += pa;
  }
  return std::abs(sum - area) <= 1e-10 * std::abs(area);
}

inline std::vector<Point2> anchor_candidates(const std::vector<CubicSegment>& loop, double area) {
  const std::size_t n = loop.size();
  std::vector<Point2> out;
  Point2 c{0, 0};
  for (const auto& s : loop) c += s.start();
  out.push_back(c / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) out.push_back(0.5 * (loop[i].start() + loop[(i + n / 2) % n].start()));
  // Area centroid from boundary moments: x_c = (1/A) oint x^2/2 dy, y_c = -(1/A) oint y^2/2 dx.
  double mx = 0.0, my = 0.0;
  for (const auto& s : loop) {
    constexpr std::array<double, 4> gl{0.0694318442029737, 0.3300094782075719, 0.6699905217924281, 0.9305681557970263};
    constexpr std::array<double, 4> gw{0.1739274225687269, 0.3260725774312731, 0.3260725774312731, 0.1739274225687269};
    for (int q = 0; q < 4; ++q) {
      const Point2 p = s.eval(gl[q]);
      const Vec2 d = s.deriv(gl[q]);
      mx += gw[q] * 0.5 * p.x * p.x * d.y;
      my -= gw[q] * 0.5 * p.y * p.y * d.x;
    }
  }
  out.push_back({mx / area, my / area});
  return out;
}

// Patches joining anchor a to the loop vertices: quads over consecutive edge
// pairs plus one triangle when the edge count is odd.
inline std::vector<CurvedPatch> anchored_patches(const Point2& a, const std::vector<CubicSegment>& loop,
                                                 std::size_t offset, bool fan) {
  const std::size_t n = loop.size();
  std::vector<CurvedPatch> ps;
  std::size_t k = 0;
  while (k < n) {
    const CubicSegment& e0 = loop[(offset + k) % n];
    if (!fan && k + 1 < n) {
      const CubicSegment& e1 = loop[(offset + k + 1) % n];
      ps.push_back(CurvedPatch::quad(
          {CubicSegment::line(a, e0.start()), e0, e1, CubicSegment::line(e1.end(), a)}));
      k += 2;
    } else {
      ps.push_back(CurvedPatch::triangle(CubicSegment::line(a, e0.start()), e0, CubicSegment::line(e0.end(), a)));
      k += 1;
    }
  }
  return ps;
}

}  // namespace detail

/// Splits a closed counterclockwise loop of cubic edges into curved quads and
/// at most one triangle. Loops with up to four edges give a single patch;
/// larger loops are joined to an interior anchor by straight chords. When no
/// anchor gives valid quads, a triangle fan around the anchor is used, and
/// failing that the loop is cut along a vertex-to-vertex chord.
inline std::vector<CurvedPatch> partition_patches(std::vector<CubicSegment> loop) {
  if (loop.empty()) throw Error(ErrorCode::InvalidArgument, "empty loop");
  if (loop.size() == 1) {
    const CubicSegment s = loop[0];
    loop = {s.sub(0.0, 1.0 / 3.0), s.sub(1.0 / 3.0, 2.0 / 3.0), s.sub(2.0 / 3.0, 1.0)};
  } else if (loop.size() == 2) {
    const std::size_t k = loop[0].is_line(1e-12) ? 1 : 0;
    const CubicSegment s = loop[k];
    const Point2 mid = s.eval(0.5);
    loop.erase(loop.begin() + static_cast<std::ptrdiff_t>(k));
    loop.insert(loop.begin() + static_cast<std::ptrdiff_t>(k),
                {s.sub(0.0, 0.5).with_endpoints(s.start(), mid), s.sub(0.5, 1.0).with_endpoints(mid, s.end())});
  }
  const double area = signed_area(loop);
  if (!(area > 0.0)) throw Error(ErrorCode::InvalidArgument, "loop must enclose positive area");
  const std::size_t n = loop.size();

  if (n == 3) {
    std::vector<CurvedPatch> best;
    double best_q = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < 3; ++r) {
      std::vector<CurvedPatch> ps{CurvedPatch::triangle(loop[r], loop[(r + 1) % 3], loop[(r + 2) % 3])};
      const double q = ps[0].min_jacobian() / area;
      if (q > best_q && detail::patches_valid(ps, area)) {
        best_q = q;
        best = ps;
      }
    }
    if (!best.empty()) return best;
  } else if (n == 4) {
    for (std::size_t r = 0; r < 4; ++r) {
      std::vector<CurvedPatch> ps{
          CurvedPatch::quad({loop[r], loop[(r + 1) % 4], loop[(r + 2) % 4], loop[(r + 3) % 4]})};
      if (detail::patches_valid(ps, area)) return ps;
    }
  }

  const JordanSplineCurve boundary = detail::loop_curve(loop);
  for (bool fan : {false, true}) {
    for (const Point2& a : detail::anchor_candidates(loop, area)) {
      if (!curve_encloses(boundary, a)) continue;
      bool visible = true;
      for (std::size_t k = 0; k < n && visible; ++k)
        visible = !detail::chord_crosses_loop(a, loop[k].start(), loop, k, (k + n - 1) % n);
      if (!visible) continue;
      for (std::size_t offset = 0; offset < (fan ? 1 : std::min<std::size_t>(n, 2)); ++offset) {
        auto ps = detail::anchored_patches(a, loop, offset, fan);
        if (detail::patches_valid(ps, area)) return ps;
      }
    }
  }

  // Thin or strongly curved loops: cut along a chord between two vertices
  // and partition both sides.
  for (std::size_t i = 0; i + 2 < n; ++i)
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j + 1 == n) continue;
      const Point2 a = loop[i].start(), b = loop[j].start();
      const Vec2 d = 1e-6 * (b - a);
      if (!curve_encloses(boundary, 0.5 * (a + b)) || detail::chord_crosses_loop(a + d, b - d, loop, n, n)) continue;
      std::vector<CubicSegment> left(loop.begin() + static_cast<std::ptrdiff_t>(i),
                                     loop.begin() + static_cast<std::ptrdiff_t>(j));
      left.push_back(CubicSegment::line(b, a));
      std::vector<CubicSegment> right(loop.begin() + static_cast<std::ptrdiff_t>(j), loop.end());
      right.insert(right.end(), loop.begin(), loop.begin() + static_cast<std::ptrdiff_t>(i));
      right.push_back(CubicSegment::line(a, b));
      try {
        auto ps = partition_patches(std::move(left));
        const auto pr = partition_patches(std::move(right));
        ps.insert(ps.end(), pr.begin(), pr.end());
        if (detail::patches_valid(ps, area)) return ps;
      } catch (const Error&) {
      }
    }
  throw Error(ErrorCode::AnchorNotFound, "no interior anchor yields valid patches");
}

}  // namespace slfv
