#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "slfv/boundary/intersect.hpp"
#include "slfv/harness/cases.hpp"
#include "slfv/harness/convergence.hpp"

using namespace slfv;

namespace {

const std::vector<Point2> kTrapezoid{{0.5, 0.0}, {2.0, 0.0}, {2.0, 2.0}, {0.0, 2.0}};

SplinegonDomain trapezoid_domain() { return SplinegonDomain({polygon_curve(kTrapezoid, Orientation::Positive)}); }

Vec2 rotation(const Point2& p, double) { return {-p.y, p.x}; }

}  // namespace

TEST(DetectExit, AgainstWindingNumber) {
  const auto dom = trapezoid_domain();
  EXPECT_FALSE(detect_exit({1.0, 1.0}, dom));
  EXPECT_TRUE(detect_exit({5.0, 5.0}, dom));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.5, 2.5);
  for (int i = 0; i < 10000; ++i) {
    const Point2 p{u(rng), u(rng)};
    EXPECT_EQ(detect_exit(p, dom), oracle::winding_number(kTrapezoid, p) == 0) << p.x << " " << p.y;
  }
}

TEST(ClosestBoundaryPoint, SimpleCases) {
  const auto box = rectangle_domain({0, 0}, {1, 1});
  const auto on = closest_boundary_point(box, {0.3, 0.0});
  EXPECT_NEAR(on.distance, 0.0, 1e-15);
  const auto below = closest_boundary_point(box, {0.5, -0.1});
  EXPECT_NEAR(below.point.x, 0.5, 1e-15);
  EXPECT_NEAR(below.point.y, 0.0, 1e-15);
  EXPECT_NEAR(below.distance, 0.1, 1e-15);
}

TEST(ClosestBoundaryPoint, SplineCurveAgainstDenseSampling) {
  std::vector<Point2> knots;
  for (int i = 0; i < 7; ++i) {
    const double a = 2 * std::numbers::pi * i / 7;
    const double r = 1.0 + 0.25 * std::cos(3 * a);
    knots.push_back({r * std::cos(a), r * std::sin(a)});
  }
  const SplinegonDomain dom({periodic_spline_curve(knots, Orientation::Positive)});
  std::vector<Point2> samples;
  for (const auto& s : dom.outer().segments) oracle::append_samples(s, 4000, samples);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 200; ++i) {
    const Point2 p{u(rng), u(rng)};
    double d = 1e300;
    for (const auto& s : samples) d = std::min(d, distance(s, p));
    const auto bp = closest_boundary_point(dom, p);
    EXPECT_LE(bp.distance, d + 1e-12);
    EXPECT_GT(bp.distance, d - 2e-4);  // half the sample spacing
    EXPECT_NEAR(distance(dom.curves()[bp.curve].eval(bp.s()), bp.point), 0.0, 1e-14);
  }
}

TEST(IntersectPathline, ConstantVelocity) {
  const auto box = rectangle_domain({0, 0}, {1, 1});
  auto u = [](const Point2&, double) { return Vec2{1.0, 0.0}; };
  auto inside = [&](const Point2& p) { return box.contains(p); };
  const double t_end = 0.7, k = 0.1;
  const auto hit = intersect_pathline(u, {0.05, 0.5}, t_end, k, box, rk_scheme(4), 0.05, 1.0, inside);
  ASSERT_TRUE(hit.has_value());
  EXPECT_NEAR(hit->t, t_end - 0.05, 1e-12);
  EXPECT_NEAR(hit->x.x, 0.0, 1e-12);
  EXPECT_NEAR(hit->x.y, 0.5, 1e-12);
  EXPECT_LT(hit->residual, 1e-12 * box.diameter());
  // An anchor far from the edge never leaves.
  Point2 fine;
  EXPECT_FALSE(intersect_pathline(u, {0.5, 0.5}, t_end, k, box, rk_scheme(4), 0.05, 1.0, inside, {}, &fine));
  EXPECT_NEAR(fine.x, 0.4, 1e-14);
}

TEST(IntersectPathline, RotationHitsStraightEdge) {
  // Upper half box; backward rotation reaches y = 0 after angle theta.
  const auto dom = rectangle_domain({-1, 0}, {1, 1});
  auto inside = [&](const Point2& p) { return dom.contains(p); };
  for (int order : {4, 6, 8}) {
    for (double theta : {0.013, 0.05, 0.11}) {
      const double r = 0.6, t_end = 2.0, k = 0.12;
      const Point2 x{r * std::cos(theta), r * std::sin(theta)};
      const auto hit = intersect_pathline(rotation, x, t_end, k, dom, rk_scheme(order), 1.0 / 64, 1.0, inside);
      ASSERT_TRUE(hit.has_value());
      const double tol = order == 4 ? 1e-8 : 1e-10;
      EXPECT_NEAR(hit->t, t_end - theta, tol) << order << " " << theta;
      EXPECT_NEAR(hit->x.x, r, tol);
      EXPECT_NEAR(hit->x.y, 0.0, 1e-12);
      EXPECT_GT(hit->t, t_end - k);
      EXPECT_LT(hit->t, t_end);
    }
  }
}

TEST(IntersectPathline, TrapezoidRunStatistics) {
  const auto c = cases::trapezoid();
  const auto g = run_grid(c, 4, 32);
  const auto& st = g.result.boundary;
  EXPECT_GT(st.hits, 0);
  EXPECT_EQ(st.outside_step, 0);
  EXPECT_LT(st.max_residual, 1e-12 * g.solver->domain()->diameter());
}

TEST(BoundaryStats, OutsideStepAndMerge) {
  BoundaryStats a, b;
  BoundaryHit h;
  h.t = 0.5;
  h.residual = 1e-14;
  a.add(h, 0.4, 0.6);
  h.t = 0.6;
  b.add(h, 0.4, 0.6);
  EXPECT_EQ(a.outside_step, 0);
  EXPECT_EQ(b.outside_step, 1);
  a.merge(b);
  EXPECT_EQ(a.hits, 2);
  EXPECT_EQ(a.outside_step, 1);
  EXPECT_EQ(a.max_residual, 1e-14);
}

TEST(AdvanceFromBoundary, InflowValueAndSource) {
  BoundaryHit hit;
  hit.x = {0.0, 0.5};
  hit.t = 0.95;
  auto u = [](const Point2&, double) { return Vec2{1.0, 0.0}; };
  const auto bc = ScalarField::constant(2.0);
  const auto& rk = rk_scheme(4);
  EXPECT_EQ(advance_from_boundary(hit, u, bc, ScalarField::zero(), rk, 1.0, true), 2.0);
  EXPECT_NEAR(advance_from_boundary(hit, u, bc, ScalarField::constant(1.0), rk, 1.0), 2.05, 1e-15);
}

TEST(AdvanceFromBoundary, SourceIntegralOrder) {
  // S = sin(x + y + t) along x' = (1, 0): exact integral is available.
  auto u = [](const Point2&, double) { return Vec2{1.0, 0.0}; };
  const ScalarField S{[](const Point2& p, double t) { return std::sin(p.x + p.y + t); }, false};
  const auto bc = ScalarField::zero();
  for (int order : {4, 6}) {
    const auto& rk = rk_scheme(order);
    auto err = [&](double ks) {
      BoundaryHit hit;
      hit.x = {0.0, 0.3};
      hit.t = 1.0 - ks;
      // x = (s - hit.t), so x + y + s = 2 s - hit.t + 0.3.
      const double exact = (std::cos(2 * hit.t - hit.t + 0.3) - std::cos(2.0 - hit.t + 0.3)) / 2.0;
      return std::abs(advance_from_boundary(hit, u, bc, S, rk, 1.0) - exact);
    };
    const double slope = std::log2(err(0.2) / err(0.1));
    EXPECT_GT(slope, order + 0.5) << order;
  }
}
