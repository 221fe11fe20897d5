#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "slfv/harness/cases.hpp"
#include "slfv/harness/norms.hpp"
#include "slfv/solver/solver.hpp"

namespace slfv {

/// Per-unit volumes of a grid multiplied by a scale factor.
inline std::vector<double> unit_volumes(const CutCellGrid& g, double scale = 1.0) {
  std::vector<double> v(g.unit_count());
  for (int u = 0; u < g.unit_count(); ++u) v[u] = scale * g.unit_volume(u);
  return v;
}

/// Refinement ratio between two grids covering the same region, or throws
/// GridMismatch.
inline int refinement_ratio(const CutCellGrid& coarse, const CutCellGrid& fine) {
  const GridSpec& c = coarse.spec();
  const GridSpec& f = fine.spec();
  const double ratio = c.h / f.h;
  const int r = static_cast<int>(std::lround(ratio));
  const double tol = 1e-9 * c.h;
  if (r < 2 || std::abs(ratio - r) > 1e-9 * ratio || distance(c.origin, f.origin) > tol ||
      c.nx != (f.nx + r - 1) / r || c.ny != (f.ny + r - 1) / r)
    throw Error(ErrorCode::GridMismatch, "fine grid is not an integer refinement of the coarse grid");
  return r;
}

/// Differences between coarse-unit averages and the fine solution
/// aggregated volume-weighted into the same coarse units.
inline std::vector<double> richardson_error(const std::vector<double>& coarse_rho, const CutCellGrid& coarse,
                                            const std::vector<double>& fine_rho, const CutCellGrid& fine) {
  if (static_cast<int>(coarse_rho.size()) != coarse.unit_count() || static_cast<int>(fine_rho.size()) != fine.unit_count())
    throw Error(ErrorCode::GridMismatch, "solution size does not match its grid");
  const int r = refinement_ratio(coarse, fine);
  const GridSpec& fs = fine.spec();
  const GridSpec& cs = coarse.spec();
  std::vector<double> mass(coarse.unit_count(), 0.0), vol(coarse.unit_count(), 0.0);
  for (int idx = 0; idx < fs.count(); ++idx) {
    const int fu = fine.unit_of_cell(idx);
    if (fu < 0) continue;
    const int cc = cs.index(fs.col(idx) / r, fs.row(idx) / r);
    const int cu = coarse.unit_of_cell(cc);
    if (cu < 0) continue;
    const double v = fine.cell(idx).volume;
    mass[cu] += v * fine_rho[fu];
    vol[cu] += v;
  }
  std::vector<double> e(coarse.unit_count());
  for (int u = 0; u < coarse.unit_count(); ++u) {
    if (!(vol[u] > 0.0)) throw Error(ErrorCode::GridMismatch, "coarse unit not covered by the fine grid");
    e[u] = coarse_rho[u] - mass[u] / vol[u];
  }
  return e;
}

/// One solver run on one grid.
struct GridRun {
  int n{0};
  std::unique_ptr<Solver> solver;
  RunResult result;
  double max_mass_err{0.0};
};

/// Solver configuration for a case on grid n: the case's step rule unless
/// the base config sets one.
inline SolverConfig case_config(const BenchmarkCase& c, int order, int n, SolverConfig base = {}) {
  base.order = order;
  base.h = c.h_for(n);
  if (!(base.k > 0.0) && !(base.k_over_h > 0.0) && !(base.cfl > 0.0)) {
    base.k_over_h = c.step.k_over_h;
    base.cfl = c.step.cfl;
  }
  return base;
}

inline GridRun run_grid(const BenchmarkCase& c, int order, int n, const SolverConfig& base = {},
                        const std::function<void(const Solver&, const SolverState&)>& on_step = {}) {
  GridRun g;
  g.n = n;
  g.solver = std::make_unique<Solver>(c.spec, case_config(c, order, n, base));
  const Solver& s = *g.solver;
  g.result = s.run(on_step ? std::function<void(const SolverState&)>([&](const SolverState& st) { on_step(s, st); })
                           : std::function<void(const SolverState&)>{});
  for (const auto& d : g.result.diagnostics) g.max_mass_err = std::max(g.max_mass_err, std::abs(d.mass_rel_err));
  return g;
}

/// Direct error of a run against the case's exact solution at the final time.
inline std::vector<double> direct_error(const BenchmarkCase& c, const GridRun& g) {
  const auto exact = g.solver->unit_averages(*c.exact, g.result.state.t);
  std::vector<double> e(exact.size());
  for (std::size_t u = 0; u < e.size(); ++u) e[u] = g.result.state.rho[u] - exact[u];
  return e;
}

/// One row of an error table: a grid (direct errors) or a grid pair
/// (Richardson errors, labelled by the coarse grid).
struct ErrorRow {
  std::string label;
  int n{0};
  double h{0.0};
  double k{0.0};
  int steps{0};
  ErrorNorms err;
  ErrorNorms rate{std::nan(""), std::nan(""), std::nan("")};  ///< rate from the previous row
  double setup_seconds{0.0};
  double step_seconds{0.0};
  double max_mass_err{0.0};
  long boundary_hits{0};
  double max_newton_residual{0.0};
};

struct ErrorReport {
  std::string case_id;
  int order{4};
  bool richardson{false};
  double ratio{2.0};
  double area{0.0};  ///< scaled domain measure used in the norm-ordering check
  std::vector<ErrorRow> rows;

  bool norms_consistent() const {
    for (const auto& r : rows)
      if (!norms_ordered(r.err, area)) return false;
    return true;
  }

  void write_csv(std::ostream& os) const {
    os << "case,order,method,label,n,h,k,steps,L1,L2,Linf,rate_L1,rate_L2,rate_Linf,setup_s,step_s,max_mass_rel_err,"
          "boundary_hits,max_newton_residual\n";
    char buf[512];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof buf,
                    "%s,%d,%s,%s,%d,%.10g,%.10g,%d,%.6e,%.6e,%.6e,%.4f,%.4f,%.4f,%.4f,%.4f,%.6e,%ld,%.6e\n",
                    case_id.c_str(), order, richardson ? "richardson" : "exact", r.label.c_str(), r.n, r.h, r.k,
                    r.steps, r.err.l1, r.err.l2, r.err.linf, r.rate.l1, r.rate.l2, r.rate.linf, r.setup_seconds,
                    r.step_seconds, r.max_mass_err, r.boundary_hits, r.max_newton_residual);
      os << buf;
    }
  }

  void write_text(std::ostream& os) const {
    os << "case " << case_id << ", order " << order << (richardson ? ", Richardson errors" : ", exact errors") << "\n";
    char buf[512];
    std::snprintf(buf, sizeof buf, "%-12s %8s %11s %6s %11s %6s %11s %6s %9s\n", "grid", "steps", "Linf", "rate",
                  "L1", "rate", "L2", "rate", "time[s]");
    os << buf;
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof buf, "%-12s %8d %11.3e %6.2f %11.3e %6.2f %11.3e %6.2f %9.3f\n", r.label.c_str(),
                    r.steps, r.err.linf, r.rate.linf, r.err.l1, r.rate.l1, r.err.l2, r.rate.l2, r.step_seconds);
      os << buf;
    }
  }
};

inline ErrorRow make_row(const GridRun& g, const std::string& label, const ErrorNorms& err) {
  ErrorRow r;
  r.label = label;
  r.n = g.n;
  r.h = g.solver->grid().h();
  r.k = g.result.k;
  r.steps = g.result.steps;
  r.err = err;
  r.setup_seconds = g.result.setup_seconds;
  r.step_seconds = g.result.step_seconds;
  r.max_mass_err = g.max_mass_err;
  r.boundary_hits = g.result.boundary.hits;
  r.max_newton_residual = g.result.boundary.max_residual;
  return r;
}

/// Runs a case on successive grids and tabulates errors and rates. Cases
/// with an exact solution get direct errors; others get Richardson errors
/// between consecutive grids. Grids must refine by a constant ratio.
inline ErrorReport run_convergence(const BenchmarkCase& c, int order, const std::vector<int>& grids,
                                   const SolverConfig& base = {},
                                   const std::function<void(const std::string&)>& log = {}) {
  if (grids.size() < 2) throw Error(ErrorCode::InvalidArgument, "convergence study needs at least two grids");
  ErrorReport rep;
  rep.case_id = c.id;
  rep.order = order;
  rep.richardson = !c.has_exact();
  rep.ratio = static_cast<double>(grids[1]) / grids[0];
  for (std::size_t i = 1; i < grids.size(); ++i)
    if (grids[i] * grids[0] != grids[i - 1] * grids[1] || grids[i] <= grids[i - 1])
      throw Error(ErrorCode::GridMismatch, "grids must refine by a constant ratio");

  std::unique_ptr<GridRun> prev;
  for (int n : grids) {
    auto cur = std::make_unique<GridRun>(run_grid(c, order, n, base));
    if (log) {
      std::ostringstream os;
      os << c.id << " order " << order << " n=" << n << ": " << cur->result.steps << " steps, "
         << cur->result.step_seconds << " s";
      log(os.str());
    }
    if (rep.area == 0.0) rep.area = c.volume_scale * cur->solver->grid().total_volume();
    if (c.has_exact()) {
      rep.rows.push_back(
          make_row(*cur, "1/" + std::to_string(n), norms(direct_error(c, *cur), unit_volumes(cur->solver->grid(), c.volume_scale))));
    } else if (prev) {
      const auto e = richardson_error(prev->result.state.rho, prev->solver->grid(), cur->result.state.rho,
                                      cur->solver->grid());
      const auto row = make_row(*prev, "1/" + std::to_string(prev->n) + "-1/" + std::to_string(n),
                          norms(e, unit_volumes(prev->solver->grid(), c.volume_scale)));
      rep.rows.push_back(row);
    }
    prev = std::move(cur);
  }
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const auto& a = rep.rows[i - 1].err;
    const auto& b = rep.rows[i].err;
    rep.rows[i].rate = {convergence_rate(a.l1, b.l1, rep.ratio), convergence_rate(a.l2, b.l2, rep.ratio),
                        convergence_rate(a.linf, b.linf, rep.ratio)};
  }
  return rep;
}

}  // namespace slfv
