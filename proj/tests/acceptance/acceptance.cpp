// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Reference values are published benchmark figures; all tolerances
// are fixed here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "slfv/slfv.hpp"

using namespace slfv;

namespace {

// Published reference errors.
constexpr double kSwirlLinf32 = 1.16e-4;
constexpr double kTrapezoidLinf64 = 1.07e-3;
constexpr double kRotationL1o4 = 4.79e-7;
constexpr double kRotationLinfO8 = 5.60e-8;

int g_failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

void note(const std::string& s) {
  std::printf("  %s\n", s.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool within_factor(double v, double ref, double f) { return v > 0.0 && v <= f * ref && v >= ref / f; }

void print_report(const ErrorReport& r) {
  char buf[256];
  for (const auto& row : r.rows) {
    std::snprintf(buf, sizeof buf, "%s o%d %-12s Linf %.3e (%.2f)  L1 %.3e (%.2f)  L2 %.3e (%.2f)  %.2fs",
                  r.case_id.c_str(), r.order, row.label.c_str(), row.err.linf, row.rate.linf, row.err.l1,
                  row.rate.l1, row.err.l2, row.rate.l2, row.step_seconds);
    note(buf);
  }
}

// Smallest rate over all norms and rows that carry a rate.
double min_rate(const ErrorReport& r) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < r.rows.size(); ++i)
    for (double v : {r.rows[i].rate.l1, r.rows[i].rate.l2, r.rows[i].rate.linf})
      m = std::min(m, std::isnan(v) ? -std::numeric_limits<double>::infinity() : v);
  return m;
}

std::vector<ErrorReport> g_reports;

template <class F>
void guarded(int id, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const QuadratureCheck q = check_quadrature(4, 9, 200);
  const double dt = seconds_since(t0);
  report(1, q.max_rel_err < 1e-10 && dt < 60.0,
         "200 patches, m=9, max rel err " + fmt("%.2e", q.max_rel_err) + " (< 1e-10), " + fmt("%.2f", dt) +
             " s (< 60 s)");
}

void criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const BenchmarkCase c = cases::trapezoid();
  std::vector<int> units(4, 0);
  double worst = 0.0;
  // The aligned grid has no cut cell below the merge threshold; the shifted
  // one does, so both are checked to cover every class.
  for (Vec2 offset : {Vec2{0.0, 0.0}, Vec2{0.37, 0.93}}) {
    SolverConfig cfg = case_config(c, 4, 64);
    cfg.grid_offset = offset;
    const Solver s(c.spec, cfg);
    for (const auto& r : check_reconstruction(s, 50)) {
      units[static_cast<int>(r.kind)] += r.units;
      worst = std::max(worst, r.max_err);
      char buf[160];
      std::snprintf(buf, sizeof buf, "offset (%.2f, %.2f) %-13s units %5d points %3d max err %.2e", offset.x,
                    offset.y, to_string(r.kind), r.units, r.points, r.max_err);
      note(buf);
    }
  }
  const double dt = seconds_since(t0);
  const bool all_classes = std::all_of(units.begin(), units.end(), [](int n) { return n > 0; });
  report(2, worst < 1e-8 && all_classes && dt < 60.0,
         "trapezoid h=1/64, degree 4, max point err " + fmt("%.2e", worst) + " (< 1e-8), all classes present: " +
             (all_classes ? "yes" : "no") + ", " + fmt("%.1f", dt) + " s (< 60 s)");
}

void criterion3() {
  const BenchmarkCase c = cases::swirl();
  const ErrorReport r4 = run_convergence(c, 4, {32, 64, 128});
  print_report(r4);
  const ErrorReport r6 = run_convergence(c, 6, {32, 64, 128});
  print_report(r6);
  g_reports.push_back(r4);
  g_reports.push_back(r6);
  const double linf = r4.rows[0].err.linf;
  const double m4 = min_rate(r4), m6 = min_rate(r6);
  report(3, m4 >= 3.5 && within_factor(linf, kSwirlLinf32, 5.0) && m6 >= 5.3,
         "swirl order 4 min rate " + fmt("%.2f", m4) + " (>= 3.5), Linf(1/32-1/64) " + fmt("%.3e", linf) +
             " (ref 1.16e-4, factor 5); order 6 min rate " + fmt("%.2f", m6) + " (>= 5.3)");
}

BoundaryStats g_trapezoid_boundary;
bool g_trapezoid_ran = false;
double g_trapezoid_diameter = 0.0;

void criterion4() {
  const BenchmarkCase c = cases::trapezoid();
  ErrorReport rep;
  rep.case_id = c.id;
  rep.order = 4;
  for (int n : {64, 128}) {
    const GridRun g = run_grid(c, 4, n);
    if (n == 64) {
      g_trapezoid_boundary = g.result.boundary;
      g_trapezoid_ran = true;
      g_trapezoid_diameter = g.solver->domain()->diameter();
      rep.area = g.solver->grid().total_volume();
    }
    rep.rows.push_back(make_row(g, "1/" + std::to_string(n), norms(direct_error(c, g), unit_volumes(g.solver->grid()))));
  }
  const auto& a = rep.rows[0].err;
  const auto& b = rep.rows[1].err;
  rep.rows[1].rate = {convergence_rate(a.l1, b.l1, 2), convergence_rate(a.l2, b.l2, 2),
                      convergence_rate(a.linf, b.linf, 2)};
  print_report(rep);
  g_reports.push_back(rep);
  report(4, within_factor(a.linf, kTrapezoidLinf64, 3.0) && rep.rows[1].rate.linf >= 3.6,
         "trapezoid Linf(1/64) " + fmt("%.3e", a.linf) + " (ref 1.07e-3, factor 3), Linf rate " +
             fmt("%.2f", rep.rows[1].rate.linf) + " (>= 3.6)");
}

void criterion5() {
  const BenchmarkCase c = cases::rotation();
  SolverConfig base;
  base.cfl = 8.0;
  const ErrorReport r4 = run_convergence(c, 4, {100, 200}, base);
  print_report(r4);
  base.cfl = 0.95;
  const ErrorReport r8 = run_convergence(c, 8, {100, 200}, base);
  print_report(r8);
  g_reports.push_back(r4);
  g_reports.push_back(r8);
  const double l1 = r4.rows[0].err.l1, rate4 = r4.rows[1].rate.l1;
  const double linf8 = r8.rows[0].err.linf, rate8 = min_rate(r8);
  // Eighth order: the finest published grids are replaced by a rate check
  // on the first pair, required within half an order of 8.
  report(5, within_factor(l1, kRotationL1o4, 3.0) && rate4 >= 4.2 && within_factor(linf8, kRotationLinfO8, 5.0) &&
                rate8 >= 7.5,
         "rotation order 4 L1(1/100) " + fmt("%.3e", l1) + " (ref 4.79e-7, factor 3), L1 rate " + fmt("%.2f", rate4) +
             " (>= 4.2); order 8 Linf(1/100) " + fmt("%.3e", linf8) + " (ref 5.60e-8, factor 5), min rate " +
             fmt("%.2f", rate8) + " (>= 7.5)");
}

void criterion6() {
  const BenchmarkCase c = cases::swirl();
  const GridRun coarse = run_grid(c, 4, 128);
  const GridRun fine = run_grid(c, 4, 256);
  const ErrorNorms e = norms(richardson_error(coarse.result.state.rho, coarse.solver->grid(), fine.result.state.rho,
                                              fine.solver->grid()),
                             unit_volumes(coarse.solver->grid()));
  report(6, coarse.max_mass_err < e.linf && coarse.max_mass_err < 1e-8,
         "swirl h=1/128 max |mass rel err| " + fmt("%.2e", coarse.max_mass_err) + " < Richardson Linf " +
             fmt("%.2e", e.linf) + " and < 1e-8");
}

void criterion7() {
  if (!g_trapezoid_ran) {
    report(7, false, "trapezoid h=1/64 run did not complete (NoConvergence or other abort)");
    return;
  }
  const BoundaryStats& b = g_trapezoid_boundary;
  const double tol = 1e-12 * g_trapezoid_diameter;
  report(7, b.hits > 0 && b.max_residual < tol && b.outside_step == 0,
         "trapezoid h=1/64: " + std::to_string(b.hits) + " hits, max residual " + fmt("%.4e", b.max_residual) +
             " (< " + fmt("%.4e", tol) + "), t* outside step " + std::to_string(b.outside_step) +
             ", bisections " + std::to_string(b.bisections) + ", aborts 0");
}

void criterion8() {
  const BenchmarkCase c = cases::rotation();
  SolverConfig base;
  base.cfl = 8.0;
  constexpr int kRepeats = 5;
  std::vector<double> lx, ly;
  for (int n : {64, 128, 256}) {
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < (n == 256 ? 2 : kRepeats); ++r) best = std::min(best, run_grid(c, 4, n, base).result.step_seconds);
    note("rotation order 4 n=" + std::to_string(n) + " step time " + fmt("%.4f", best) + " s");
    lx.push_back(std::log(n));
    ly.push_back(std::log(best));
  }
  const double mx = (lx[0] + lx[1] + lx[2]) / 3.0, my = (ly[0] + ly[1] + ly[2]) / 3.0;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < 3; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = sxy / sxx;
  report(8, slope >= 2.6 && slope <= 3.4, "wall-time exponent over 1/64, 1/128, 1/256: " + fmt("%.2f", slope) +
                                              " (in [2.6, 3.4])");
}

void criterion9() {
  int checks = 0, fails = 0;
  auto expect = [&](bool ok, const std::string& what) {
    ++checks;
    if (!ok) {
      ++fails;
      note("invariant failed: " + what);
    }
  };

  // Identity flow on each domain kind.
  for (const BenchmarkCase& base : {cases::swirl(), cases::trapezoid(), cases::rotation()}) {
    ProblemSpec spec = base.spec;
    spec.velocity = VelocityField::zero();
    spec.source = SourceField::zero();
    spec.final_time = 0.25;
    SolverConfig cfg = case_config(base, 4, 32);
    cfg.k = 0.05;
    const Solver s(spec, cfg);
    const SolverState init = s.init_state();
    const RunResult r = s.run();
    expect(r.state.rho == init.rho, "identity flow on " + base.id);
  }

  // Constant preservation with nonzero flow.
  for (int order : {4, 6}) {
    for (const BenchmarkCase& base : {cases::swirl(), cases::trapezoid(), cases::rotation()}) {
      ProblemSpec spec = base.spec;
      spec.source = SourceField::zero();
      spec.initial = ScalarField::constant(2.5);
      if (spec.boundary) spec.boundary = ScalarField::constant(2.5);
      spec.final_time = 0.3;
      const Solver s(spec, case_config(base, order, 32));
      const RunResult r = s.run();
      double worst = 0.0;
      for (double v : r.state.rho) worst = std::max(worst, std::abs(v - 2.5));
      expect(worst < 1e-12, "constant preservation on " + base.id + " order " + std::to_string(order) +
                                " (" + fmt("%.2e", worst) + ")");
    }
  }

  for (int order : {4, 6, 8}) {
    const RKScheme& rk = rk_scheme(order);
    expect(order_condition_defect(rk, order) < 1e-12, "order conditions of " + rk.name);
  }

  for (const auto& r : g_reports) expect(r.norms_consistent(), "norm ordering on " + r.case_id);

  report(9, fails == 0 && !g_reports.empty(),
         std::to_string(checks) + " invariant checks, " + std::to_string(fails) + " failures (" +
             std::to_string(g_reports.size()) + " reports checked for norm ordering)");
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  guarded(1, criterion1);
  guarded(2, criterion2);
  guarded(3, criterion3);
  guarded(4, criterion4);
  guarded(5, criterion5);
  guarded(6, criterion6);
  guarded(7, criterion7);
  guarded(8, criterion8);
  guarded(9, criterion9);
  std::printf("%d failure(s), %.1f s total\n", g_failures, seconds_since(t0));
  return g_failures == 0 ? 0 : 1;
}
