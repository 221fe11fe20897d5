#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <random>

#include "oracles.hpp"
#include "slfv/harness/checks.hpp"
#include "slfv/quadrature/cell_rule.hpp"
#include "slfv/quadrature/gauss_legendre.hpp"

using namespace slfv;

namespace {

CurvedPatch straight_quad(const std::array<Point2, 4>& v) {
  return CurvedPatch::quad({CubicSegment::line(v[0], v[1]), CubicSegment::line(v[1], v[2]),
                            CubicSegment::line(v[2], v[3]), CubicSegment::line(v[3], v[0])});
}

const std::vector<Point2> kTrapezoid{{0.5, 0.0}, {2.0, 0.0}, {2.0, 2.0}, {0.0, 2.0}};

}  // namespace

TEST(GaussLegendre, SmallRulesClosedForm) {
  const auto& g1 = gauss_legendre(1);
  ASSERT_EQ(g1.size(), 1);
  EXPECT_DOUBLE_EQ(g1.nodes[0], 0.0);
  EXPECT_DOUBLE_EQ(g1.weights[0], 2.0);
  const auto& g2 = gauss_legendre(2);
  ASSERT_EQ(g2.size(), 2);
  EXPECT_NEAR(std::abs(g2.nodes[0]), 1.0 / std::sqrt(3.0), 2e-16);
  EXPECT_NEAR(g2.nodes[0] + g2.nodes[1], 0.0, 1e-16);
  EXPECT_NEAR(g2.weights[0], 1.0, 1e-15);
  EXPECT_NEAR(g2.weights[1], 1.0, 1e-15);
}

TEST(GaussLegendre, ExactUpToDegree2mMinus1) {
  for (int m = 1; m <= 20; ++m) {
    const auto& g = gauss_legendre(m);
    for (int d = 0; d <= 2 * m - 1; ++d) {
      double s = 0.0;
      for (int i = 0; i < m; ++i) s += g.weights[i] * std::pow(g.nodes[i], d);
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
      EXPECT_NEAR(s, exact, 2e-15) << "m=" << m << " d=" << d;
    }
  }
  const auto& g9 = gauss_legendre(9);
  double s = 0.0;
  for (int i = 0; i < 9; ++i) s += g9.weights[i] * std::pow(g9.nodes[i], 16);
  EXPECT_NEAR(s, 2.0 / 17.0, 1e-15);
}

TEST(BlendingMap, SquareCenterAndEdges) {
  const auto sq = straight_quad({{{0, 0}, {1, 0}, {1, 1}, {0, 1}}});
  const Point2 c = blending_map(sq).eval(0.0, 0.0);
  EXPECT_NEAR(c.x, 0.5, 1e-16);
  EXPECT_NEAR(c.y, 0.5, 1e-16);
  EXPECT_NEAR(sq.jacobian(0.3, -0.2), 0.25, 1e-15);
}

TEST(BlendingMap, ReproducesCurvedEdge) {
  const auto e2 = CubicSegment::hermite({1, 0}, {0.6, 1.0}, {1, 1}, {-0.4, 1.0});
  const auto p = CurvedPatch::quad(
      {CubicSegment::line({0, 0}, {1, 0}), e2, CubicSegment::line({1, 1}, {0, 1}), CubicSegment::line({0, 1}, {0, 0})});
  for (double eta = -1.0; eta <= 1.0; eta += 0.125) {
    const Point2 m = p.eval(1.0, eta), e = e2.eval(0.5 * (eta + 1.0));
    EXPECT_NEAR(m.x, e.x, 1e-15);
    EXPECT_NEAR(m.y, e.y, 1e-15);
  }
}

TEST(BlendingMap, TriangleCollapsesToVertex) {
  const Point2 a{0, 0}, b{1, 0}, c{0.3, 1};
  const auto t = CurvedPatch::triangle(CubicSegment::line(a, b), CubicSegment::hermite(b, {-0.5, 1.2}, c, {-0.9, 0.8}),
                                       CubicSegment::line(c, a));
  for (double eta = -1.0; eta <= 1.0; eta += 0.25) {
    const Point2 m = t.eval(-1.0, eta);
    EXPECT_NEAR(m.x, a.x, 1e-15);
    EXPECT_NEAR(m.y, a.y, 1e-15);
  }
}

TEST(PatchRule, UnitSquareIntegratesOne) {
  const auto sq = straight_quad({{{0, 0}, {1, 0}, {1, 1}, {0, 1}}});
  for (int m = 1; m <= 10; ++m) EXPECT_NEAR(patch_rule(sq, m, m).sum(), 1.0, 1e-14);
}

TEST(PatchRule, StraightTrapezoidLinearIntegrand) {
  const auto p = straight_quad({{kTrapezoid[0], kTrapezoid[1], kTrapezoid[2], kTrapezoid[3]}});
  const double exact = oracle::polygon_monomial(kTrapezoid, 1, 0) + oracle::polygon_monomial(kTrapezoid, 0, 1);
  const double q = patch_rule(p, 3, 3).integrate([](const Point2& x) { return x.x + x.y; });
  EXPECT_NEAR(q, exact, 1e-14);
}

namespace {

// Quarter disk of radius 1 bounded by a cubic Hermite arc.
CurvedPatch quarter_disk() {
  const double k = 4.0 * (std::sqrt(2.0) - 1.0);
  const auto arc = CubicSegment::hermite({1, 0}, {0, k}, {0, 1}, {-k, 0});
  const Point2 o{0, 0};
  return CurvedPatch::triangle(CubicSegment::line(o, {1, 0}), arc, CubicSegment::line({0, 1}, o));
}

double max_rel_err(const CurvedPatch& p, int m, int kappa, bool total_degree) {
  const auto rule = patch_rule(p, m, m);
  double worst = 0.0;
  for (int a = 0; a <= kappa; ++a)
    for (int b = 0; b <= kappa; ++b) {
      if (total_degree && a + b > kappa) continue;
      const double q = rule.integrate([&](const Point2& x) { return std::pow(x.x, a) * std::pow(x.y, b); });
      const double ref = monomial_integral_oracle(p, a, b);
      worst = std::max(worst, std::abs(q - ref) / std::abs(ref));
    }
  return worst;
}

}  // namespace

// With cubic edges, m = ceil((kappa + 2) 3 / 2) nodes integrate g(M) |J|
// exactly when g has total degree <= kappa.
TEST(PatchRule, CubicEdgedQuarterDiskTotalDegree) {
  EXPECT_LT(max_rel_err(quarter_disk(), 9, 4, true), 1e-12);
  EXPECT_LT(max_rel_err(quarter_disk(), 12, 6, true), 1e-12);
  EXPECT_LT(max_rel_err(quarter_disk(), 15, 8, true), 1e-12);
}

// Degree kappa in each variable needs ceil((2 kappa + 2) 3 / 2) nodes for
// exactness; nine nodes are then only approximate on a strongly curved edge.
TEST(PatchRule, CubicEdgedQuarterDiskPerVariableDegree) {
  EXPECT_LT(max_rel_err(quarter_disk(), 15, 4, false), 1e-12);
  const double e9 = max_rel_err(quarter_disk(), 9, 4, false);
  EXPECT_GT(e9, 1e-12);
  EXPECT_LT(e9, 1e-7);
}

TEST(PatchRule, RandomPatchesMeetTheExactnessBound) {
  const auto c = check_quadrature(4, 9, 40, 2718);
  EXPECT_LT(c.max_rel_err, 1e-10);
  // Fewer nodes are visibly worse, so the check has teeth.
  EXPECT_GT(check_quadrature(4, 5, 40, 2718).max_rel_err, 1e-8);
}

TEST(CellRule, NodeCountsPerOrder) {
  EXPECT_EQ(pure_gauss_points(4), 3);
  EXPECT_EQ(pure_gauss_points(6), 4);
  EXPECT_EQ(pure_gauss_points(8), 5);
  EXPECT_EQ(interface_gauss_points(4), 9);
  EXPECT_EQ(interface_gauss_points(6), 12);
  EXPECT_EQ(interface_gauss_points(8), 15);
  EXPECT_THROW(pure_gauss_points(5), Error);
}

TEST(CellRule, PureAndInterfaceCells) {
  const SplinegonDomain dom({polygon_curve(kTrapezoid, Orientation::Positive)});
  const auto grid = merge_small_cells(classify_cells(dom, grid_for_domain(dom, 1.0 / 8)), 0.1);
  bool saw_pure = false, saw_iface = false;
  for (int u = 0; u < grid.unit_count(); ++u) {
    const auto r = cell_rule(grid, u, 3, 9);
    double s = 0.0;
    for (double w : r.weights) s += w;
    EXPECT_NEAR(s, 1.0, 1e-14);
    if (grid.unit_is_pure(u)) {
      saw_pure = true;
      EXPECT_EQ(r.nodes.size(), 9u);
    } else if (grid.unit_has_interface(u) && !grid.unit_is_merged(u)) {
      saw_iface = true;
      EXPECT_EQ(r.nodes.size() % 81, 0u);
      // Centroid of the clipped cell polygon.
      const int c = grid.unit_host(u);
      const Point2 lo = grid.spec().lo(grid.spec().col(c), grid.spec().row(c));
      const double h = grid.h();
      const auto piece = oracle::clip({lo, {lo.x + h, lo.y}, {lo.x + h, lo.y + h}, {lo.x, lo.y + h}}, kTrapezoid);
      const double cx = oracle::polygon_monomial(piece, 1, 0) / oracle::shoelace(piece);
      EXPECT_NEAR(r.average([](const Point2& p) { return p.x; }), cx, 1e-14);
    }
  }
  EXPECT_TRUE(saw_pure);
  EXPECT_TRUE(saw_iface);
}

TEST(BoundaryRule, StraightSegments) {
  const auto seg = CubicSegment::line({0, 0}, {1, 1});
  const auto r = boundary_rule({seg}, 4);
  EXPECT_NEAR(r.average([](const Point2&) { return 1.0; }), 1.0, 1e-15);
  EXPECT_NEAR(r.average([](const Point2& p) { return p.x; }), 0.5, 1e-15);
  EXPECT_NEAR(r.length, std::sqrt(2.0), 1e-15);
}

TEST(BoundaryRule, CubicArcAgainstAdaptiveOracle) {
  using boost::math::quadrature::gauss_kronrod;
  const auto s = CubicSegment::hermite({0, 0}, {1.0, 0.8}, {1, 0.5}, {0.8, -0.6});
  auto speed = [&](double l) { return norm(s.deriv(l)); };
  const double len = gauss_kronrod<double, 61>::integrate(speed, 0.0, 1.0, 15, 1e-15);
  const double num =
      gauss_kronrod<double, 61>::integrate([&](double l) { return std::pow(s.eval(l).x, 2) * speed(l); }, 0.0, 1.0, 15, 1e-15);
  const auto r = boundary_rule({s}, 20);
  EXPECT_NEAR(r.length, len, 1e-12);
  EXPECT_NEAR(r.average([](const Point2& p) { return p.x * p.x; }), num / len, 1e-12);
}

namespace {

SplinegonDomain flower(double amp, int knots = 40) {
  std::vector<Point2> pts;
  for (int i = 0; i < knots; ++i) {
    const double a = 2 * std::numbers::pi * i / knots;
    const double r = 0.35 + amp * std::cos(5 * a);
    pts.push_back({0.5 + r * std::cos(a), 0.5 + r * std::sin(a)});
  }
  return SplinegonDomain({periodic_spline_curve(pts, Orientation::Positive)});
}

}  // namespace

// Curved cut cells where the Jacobian turns negative only near patch edges,
// and thin slivers that no interior anchor can split.
TEST(CellRule, CurvedDomainsOnManyGrids) {
  for (const auto& [amp, n] : std::vector<std::pair<double, int>>{{0.0, 32}, {0.0, 64}, {0.08, 16}, {0.08, 64}, {0.07, 32}}) {
    const auto dom = flower(amp);
    const auto grid = merge_small_cells(classify_cells(dom, grid_for_domain(dom, 1.0 / n)), 0.1);
    double vol = 0.0;
    for (int u = 0; u < grid.unit_count(); ++u) {
      const auto r = cell_rule(grid, u, 3, 9);
      for (double w : r.weights) EXPECT_GT(w, 0.0);
      double x = 0.0;
      for (std::size_t k = 0; k < r.nodes.size(); ++k) x += r.weights[k] * r.nodes[k].x;
      vol += grid.unit_volume(u);
      EXPECT_GT(x, grid.unit_center(u).x - grid.h());
      EXPECT_LT(x, grid.unit_center(u).x + grid.h());
    }
    EXPECT_NEAR(vol, dom.area(), 1e-12) << amp << " " << n;
  }
}

TEST(Partition, ThinSliverUsesChordSplit) {
  // Two curved edges meeting at a spline knot, closed by a narrow box.
  const auto dom = flower(0.08);
  const auto grid = classify_cells(dom, grid_for_domain(dom, 1.0 / 64));
  const int idx = grid.spec().index(5, 26);
  ASSERT_EQ(grid.cell(idx).cls, CellClass::Interface);
  std::vector<CubicSegment> loop;
  for (const auto& e : grid.cell(idx).loop) loop.push_back(e.seg);
  const auto ps = partition_patches(loop);
  double a = 0.0;
  for (const auto& p : ps) {
    EXPECT_GT(p.min_jacobian(64), 0.0);
    a += p.area();
  }
  EXPECT_NEAR(a, grid.cell(idx).volume, 1e-14);
}
