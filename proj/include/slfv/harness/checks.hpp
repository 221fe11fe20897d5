#pragma once

#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "slfv/harness/cases.hpp"
#include "slfv/quadrature/cell_rule.hpp"
#include "slfv/solver/solver.hpp"

namespace slfv {

/// Random patch with cubic edges around (1, 1), inside [0.4, 1.6]^2.
/// Edges bulge sideways by up to 30% of their chord; patches whose blending
/// map folds are redrawn.
inline CurvedPatch random_patch(std::mt19937_64& rng, bool triangle) {
  std::uniform_real_distribution<double> jitter(-0.1, 0.1), bulge(-0.3, 0.3);
  auto edge = [&](const Point2& a, const Point2& b) {
    const Vec2 d = b - a;
    const Vec2 n{-d.y, d.x};
    return CubicSegment::hermite(a, d + bulge(rng) * n, b, d + bulge(rng) * n);
  };
  for (;;) {
    CurvedPatch p;
    if (triangle) {
      const double th = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
      std::array<Point2, 3> v;
      for (int k = 0; k < 3; ++k) {
        const double a = th + 2.0 * std::numbers::pi * k / 3.0;
        v[k] = {1.0 + 0.5 * std::cos(a) + jitter(rng), 1.0 + 0.5 * std::sin(a) + jitter(rng)};
      }
      p = CurvedPatch::triangle(edge(v[0], v[1]), edge(v[1], v[2]), edge(v[2], v[0]));
    } else {
      const std::array<Point2, 4> base{{{0.6, 0.6}, {1.4, 0.6}, {1.4, 1.4}, {0.6, 1.4}}};
      std::array<Point2, 4> v;
      for (int k = 0; k < 4; ++k) v[k] = {base[k].x + jitter(rng), base[k].y + jitter(rng)};
      p = CurvedPatch::quad({edge(v[0], v[1]), edge(v[1], v[2]), edge(v[2], v[3]), edge(v[3], v[0])});
    }
    if (p.min_jacobian(32) > 1e-3) return p;
  }
}

/// Adaptive reference for the integral of x^a y^b over a patch: the
/// boundary integral of x^(a+1) y^b / (a+1) dy along each cubic edge,
/// evaluated by adaptive Gauss-Kronrod.
inline double monomial_integral_oracle(const CurvedPatch& p, int a, int b) {
  using boost::math::quadrature::gauss_kronrod;
  const int ne = p.kind == CurvedPatch::Kind::Quad ? 4 : 3;
  double s = 0.0;
  for (int k = 0; k < ne; ++k) {
    const CubicSegment& e = p.e[k];
    auto f = [&](double l) {
      const Point2 q = e.eval(l);
      return std::pow(q.x, a + 1) * std::pow(q.y, b) * e.deriv(l).y;
    };
    s += gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 10, 1e-12);
  }
  return s / (a + 1);
}

struct QuadratureCheck {
  int kappa{4};
  int m{9};
  int patches{0};
  double max_rel_err{0.0};
};

/// Largest relative error of patch_rule with m x m nodes over random patches
/// for all x^a y^b with max(a, b) <= kappa. Every fourth patch is a triangle.
inline QuadratureCheck check_quadrature(int kappa, int m, int n_patches, unsigned seed = 12345) {
  std::mt19937_64 rng(seed);
  QuadratureCheck out{kappa, m, n_patches, 0.0};
  for (int i = 0; i < n_patches; ++i) {
    const CurvedPatch p = random_patch(rng, i % 4 == 3);
    const QuadratureRule r = patch_rule(p, m, m);
    for (int a = 0; a <= kappa; ++a)
      for (int b = 0; b <= kappa; ++b) {
        const double exact = monomial_integral_oracle(p, a, b);
        const double q = r.integrate([&](const Point2& x) { return std::pow(x.x, a) * std::pow(x.y, b); });
        out.max_rel_err = std::max(out.max_rel_err, std::abs(q - exact) / std::abs(exact));
      }
  }
  return out;
}

/// Reconstruction classes reported by the exactness check.
enum class UnitKind { Standard, NearBoundary, Interface, Merged };

inline const char* to_string(UnitKind k) {
  switch (k) {
    case UnitKind::Standard: return "standard";
    case UnitKind::NearBoundary: return "near_boundary";
    case UnitKind::Interface: return "interface";
    case UnitKind::Merged: return "merged";
  }
  return "?";
}

inline UnitKind unit_kind(const Reconstructor& rec, int u) {
  const CutCellGrid& g = rec.grid();
  if (g.unit_is_merged(u)) return UnitKind::Merged;
  if (g.unit_has_interface(u)) return UnitKind::Interface;
  return rec.is_standard(u) ? UnitKind::Standard : UnitKind::NearBoundary;
}

struct ReconstructionCheck {
  UnitKind kind;
  int units{0};
  int points{0};
  double max_err{0.0};
};

/// Random point of unit u inside the domain.
inline Point2 random_point_in_unit(const Solver& s, int u, std::mt19937_64& rng) {
  const CutCellGrid& g = s.grid();
  const auto& members = g.unit_members(u);
  std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int tries = 0; tries < 100000; ++tries) {
    const int c = members[pick(rng)];
    const Point2 lo = g.spec().lo(g.spec().col(c), g.spec().row(c));
    const Point2 p{lo.x + g.h() * unit(rng), lo.y + g.h() * unit(rng)};
    if (g.cell(c).cls == CellClass::Pure || s.inside(p)) return p;
  }
  throw Error(ErrorCode::InvalidArgument, "could not sample a point inside the unit");
}

/// Fits exact averages of a random polynomial of total degree q on every
/// unit and reports, per unit class, the largest point error at
/// `points_per_class` random in-cell points.
inline std::vector<ReconstructionCheck> check_reconstruction(const Solver& s, int points_per_class,
                                                             unsigned seed = 2024) {
  const Reconstructor& rec = s.reconstructor();
  const CutCellGrid& g = s.grid();
  const int q = rec.basis().degree();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<std::array<int, 2>> exps;
  std::vector<double> cs;
  for (int d = 0; d <= q; ++d)
    for (int a = d; a >= 0; --a) {
      exps.push_back({a, d - a});
      cs.push_back(coef(rng));
    }
  auto f = [&](const Point2& p) {
    double v = 0.0;
    for (std::size_t k = 0; k < cs.size(); ++k) v += cs[k] * std::pow(p.x, exps[k][0]) * std::pow(p.y, exps[k][1]);
    return v;
  };
  const int U = g.unit_count();
  std::vector<double> rho(U), bvals(U, 0.0);
  for (int u = 0; u < U; ++u) {
    rho[u] = s.rules()[u].average(f);
    if (const auto* br = rec.boundary_rule_of(u)) bvals[u] = br->average(f);
  }
  Eigen::MatrixXd coeffs;
  rec.compute(rho, bvals, coeffs);

  std::vector<ReconstructionCheck> out;
  for (UnitKind k : {UnitKind::Standard, UnitKind::NearBoundary, UnitKind::Interface, UnitKind::Merged}) {
    std::vector<int> units;
    for (int u = 0; u < U; ++u)
      if (unit_kind(rec, u) == k) units.push_back(u);
    ReconstructionCheck c{k, static_cast<int>(units.size()), 0, 0.0};
    if (!units.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, units.size() - 1);
      for (int i = 0; i < points_per_class; ++i) {
        const int u = units[pick(rng)];
        const Point2 p = random_point_in_unit(s, u, rng);
        c.max_err = std::max(c.max_err, std::abs(rec.evaluate(coeffs, u, p) - f(p)));
        ++c.points;
      }
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace slfv
