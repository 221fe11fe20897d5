#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "slfv/slfv.hpp"

namespace fs = std::filesystem;
using namespace slfv;

namespace {

struct CommonOptions {
  std::string case_id;
  std::string config;
  std::vector<int> orders;
  std::vector<int> grids;
  double cfl{0.0};
  double k_over_h{0.0};
  std::string out;
  int threads{1};
  std::vector<double> offset;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--case", o.case_id, "built-in case: swirl, trapezoid, rotation, mixing, custom");
  app->add_option("--config", o.config, "INI config file")->check(CLI::ExistingFile);
  app->add_option("--order", o.orders, "solver order(s): 4, 6 or 8")->delimiter(',');
  app->add_option("--grids", o.grids, "grid counts N (h = length unit / N), comma separated")->delimiter(',');
  auto* cfl = app->add_option("--cfl", o.cfl, "k = cfl * h / (max|u| + max|v|)");
  app->add_option("--k-over-h", o.k_over_h, "k = c * h")->excludes(cfl);
  app->add_option("--out", o.out, "output directory");
  app->add_option("--threads", o.threads, "worker threads per run")->check(CLI::PositiveNumber);
  app->add_option("--grid-offset", o.offset, "splinegon grid origin shift in units of h: dx,dy")
      ->delimiter(',')
      ->expected(2);
}

// Case, solver overrides and grids from the command line and config file.
RunConfig resolve(const CommonOptions& o, const std::vector<int>& default_grids) {
  if (o.case_id.empty() && o.config.empty()) throw CLI::RequiredError("--case");
  RunConfig rc;
  if (!o.config.empty()) {
    std::optional<BenchmarkCase> base;
    if (!o.case_id.empty() && o.case_id != "custom") base = case_library(o.case_id);
    rc = load_config_file(o.config, base);
  } else {
    rc.bench = case_library(o.case_id);
  }
  if (o.cfl > 0.0) rc.bench.step = {0.0, o.cfl};
  if (o.k_over_h > 0.0) rc.bench.step = {o.k_over_h, 0.0};
  if (o.cfl > 0.0 || o.k_over_h > 0.0) rc.solver.k = 0.0;
  rc.solver.threads = o.threads;
  if (o.offset.size() == 2) rc.solver.grid_offset = {o.offset[0], o.offset[1]};
  if (!o.grids.empty()) rc.grids = o.grids;
  if (rc.grids.empty()) rc.grids = default_grids;
  if (!o.out.empty()) rc.out_dir = o.out;
  return rc;
}

std::vector<int> orders_of(const CommonOptions& o, const RunConfig& rc) {
  return o.orders.empty() ? std::vector<int>{rc.solver.order} : o.orders;
}

std::string stem(const std::string& id, int order, int n) {
  return id + "_o" + std::to_string(order) + "_n" + std::to_string(n);
}

void write_field(const fs::path& path, const Solver& s, const SolverState& st) {
  std::ofstream os(path);
  os << "i,j,x_center,y_center,volume,rho\n";
  const CutCellGrid& g = s.grid();
  char buf[256];
  for (int u = 0; u < g.unit_count(); ++u) {
    const int c = g.unit_host(u);
    const Point2 p = g.unit_center(u);
    std::snprintf(buf, sizeof buf, "%d,%d,%.12g,%.12g,%.12g,%.17g\n", g.spec().col(c), g.spec().row(c), p.x, p.y,
                  g.unit_volume(u), st.rho[u]);
    os << buf;
  }
}

void write_reconstruction(const fs::path& path, const Solver& s, const SolverState& st) {
  const Reconstructor& rec = s.reconstructor();
  const CutCellGrid& g = s.grid();
  std::vector<double> bvals(g.unit_count(), 0.0);
  if (s.problem().boundary)
    for (int u = 0; u < g.unit_count(); ++u)
      if (const auto* br = rec.boundary_rule_of(u))
        bvals[u] = br->average([&](const Point2& p) { return (*s.problem().boundary)(p, st.t); });
  Eigen::MatrixXd coeffs;
  rec.compute(st.rho, bvals, coeffs);
  std::ofstream os(path);
  os << "unit,i,j,kind,lattice_size,boundary_row,condition,residual\n";
  char buf[256];
  for (int u = 0; u < g.unit_count(); ++u) {
    const auto& lat = rec.lattice(u);
    const int c = g.unit_host(u);
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%s,%zu,%d,%.6e,%.6e\n", u, g.spec().col(c), g.spec().row(c),
                  to_string(unit_kind(rec, u)), lat.members.size(), lat.has_boundary_row ? 1 : 0, lat.condition,
                  rec.residual(st.rho, bvals, coeffs, u));
    os << buf;
  }
}

int cmd_run(const CommonOptions& o, std::vector<double> dump_times, bool dump_recon) {
  RunConfig rc = resolve(o, {64});
  if (dump_times.empty()) dump_times = rc.dump_times;
  dump_recon = dump_recon || rc.dump_reconstruction;
  if (rc.out_dir.empty()) rc.out_dir = ".";
  fs::create_directories(rc.out_dir);
  for (int order : orders_of(o, rc))
    for (int n : rc.grids) {
      const std::string base = stem(rc.bench.id, order, n);
      const SolverConfig cfg = case_config(rc.bench, order, n, rc.solver);
      std::cerr << "setting up " << base << " (h = " << cfg.h << ")\n";
      Solver s(rc.bench.spec, cfg);
      std::size_t next_dump = 0;
      std::sort(dump_times.begin(), dump_times.end());
      const double eps = 1e-9 * std::max(1.0, rc.bench.spec.final_time);
      auto on_step = [&](const SolverState& st) {
        while (next_dump < dump_times.size() && st.t >= dump_times[next_dump] - eps) {
          char name[64];
          std::snprintf(name, sizeof name, "_field_t%.6f.csv", st.t);
          write_field(fs::path(rc.out_dir) / (base + name), s, st);
          ++next_dump;
        }
        if (dump_recon && st.step == 0) write_reconstruction(fs::path(rc.out_dir) / (base + "_reconstruction.csv"), s, st);
      };
      const RunResult res = s.run(on_step);

      std::ofstream diag(fs::path(rc.out_dir) / (base + "_diagnostics.csv"));
      diag << "n,t,mass_rel_err,boundary_hits,max_newton_residual\n";
      diag << "0,0,0,0,0\n";
      char buf[256];
      for (const auto& d : res.diagnostics) {
        std::snprintf(buf, sizeof buf, "%d,%.12g,%.6e,%ld,%.6e\n", d.n, d.t, d.mass_rel_err, d.boundary.hits,
                      d.boundary.max_residual);
        diag << buf;
      }

      std::printf("%s: %d steps, k = %.6g, setup %.3f s, steps %.3f s, mass_rel_err(T) = %.3e, boundary hits %ld\n",
                  base.c_str(), res.steps, res.k, res.setup_seconds, res.step_seconds,
                  res.diagnostics.empty() ? 0.0 : res.diagnostics.back().mass_rel_err, res.boundary.hits);
      if (rc.bench.has_exact()) {
        const auto exact = s.unit_averages(*rc.bench.exact, res.state.t);
        std::vector<double> e(exact.size());
        for (std::size_t u = 0; u < e.size(); ++u) e[u] = res.state.rho[u] - exact[u];
        const auto nrm = norms(e, unit_volumes(s.grid(), rc.bench.volume_scale));
        std::printf("%s: errors L1 %.3e  L2 %.3e  Linf %.3e\n", base.c_str(), nrm.l1, nrm.l2, nrm.linf);
      }
    }
  return 0;
}

int cmd_converge(const CommonOptions& o, const std::string& format) {
  RunConfig rc = resolve(o, {32, 64, 128});
  for (int order : orders_of(o, rc)) {
    const ErrorReport rep = run_convergence(rc.bench, order, rc.grids, rc.solver,
                                            [](const std::string& m) { std::cerr << m << "\n"; });
    if (format == "csv") rep.write_csv(std::cout);
    else rep.write_text(std::cout);
    if (!rc.out_dir.empty()) {
      fs::create_directories(rc.out_dir);
      const std::string base = rc.bench.id + "_o" + std::to_string(order) + "_convergence";
      std::ofstream csv(fs::path(rc.out_dir) / (base + ".csv"));
      rep.write_csv(csv);
      std::ofstream txt(fs::path(rc.out_dir) / (base + ".txt"));
      rep.write_text(txt);
    }
    if (!rep.norms_consistent()) std::cerr << "warning: norm ordering violated\n";
  }
  return 0;
}

int cmd_check_quadrature(const std::vector<int>& kappas, int patches, unsigned seed) {
  std::cout << "kappa,m,patches,max_rel_err\n";
  for (int kappa : kappas) {
    const int m = interface_gauss_points(kappa);
    for (int mm : {m - 1, m}) {
      const auto r = check_quadrature(kappa, mm, patches, seed);
      std::printf("%d,%d,%d,%.3e\n", r.kappa, r.m, r.patches, r.max_rel_err);
    }
  }
  return 0;
}

int cmd_check_reconstruction(CommonOptions o, int points, unsigned seed) {
  if (o.case_id.empty() && o.config.empty()) o.case_id = "trapezoid";
  RunConfig rc = resolve(o, {64});
  std::cout << "order,n,class,units,points,max_err\n";
  for (int order : orders_of(o, rc))
    for (int n : rc.grids) {
      Solver s(rc.bench.spec, case_config(rc.bench, order, n, rc.solver));
      for (const auto& r : check_reconstruction(s, points, seed))
        std::printf("%d,%d,%s,%d,%d,%.3e\n", order, n, to_string(r.kind), r.units, r.points, r.max_err);
    }
  return 0;
}

int cmd_dump_grid(const CommonOptions& o) {
  RunConfig rc = resolve(o, {64});
  const int order = orders_of(o, rc).front();
  const int n = rc.grids.front();
  Solver s(rc.bench.spec, case_config(rc.bench, order, n, rc.solver));
  const CutCellGrid& g = s.grid();
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    file.open(fs::path(o.out) / (stem(rc.bench.id, order, n) + "_grid.csv"));
    os = &file;
  }
  *os << "i,j,class,volume,cut_length,host,unit\n";
  char buf[256];
  for (int c = 0; c < g.spec().count(); ++c) {
    const auto& cell = g.cell(c);
    const char* cls = cell.cls == CellClass::Pure ? "pure" : cell.cls == CellClass::Interface ? "interface" : "empty";
    std::snprintf(buf, sizeof buf, "%d,%d,%s,%.12g,%.12g,%d,%d\n", g.spec().col(c), g.spec().row(c), cls, cell.volume,
                  cell.cut_length, g.host(c), g.unit_of_cell(c));
    *os << buf;
  }
  std::fprintf(stderr, "%d cells, %d units, total volume %.15g\n", g.spec().count(), g.unit_count(), g.total_volume());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-Lagrangian finite-volume advection solver"};
  app.require_subcommand(1);

  CommonOptions run_o, conv_o, rec_o, grid_o;
  std::vector<double> dump_times;
  bool dump_recon = false;
  auto* run = app.add_subcommand("run", "run one case on one or more grids");
  add_common(run, run_o);
  run->add_option("--dump-fields", dump_times, "times at which to write field CSVs")->delimiter(',');
  run->add_flag("--dump-reconstruction", dump_recon, "write per-unit lattice diagnostics");

  std::string format = "text";
  auto* conv = app.add_subcommand("converge", "error and rate table over refined grids");
  add_common(conv, conv_o);
  conv->add_option("--format", format, "stdout format")->check(CLI::IsMember({"text", "csv"}));

  std::vector<int> kappas{4, 6, 8};
  int patches = 200;
  unsigned seed = 12345;
  auto* cq = app.add_subcommand("check-quadrature", "exactness table of curved-patch rules");
  cq->add_option("--order", kappas, "orders to check")->delimiter(',');
  cq->add_option("--patches", patches, "random patches per order");
  cq->add_option("--seed", seed, "random seed");

  int points = 50;
  auto* cr = app.add_subcommand("check-reconstruction", "polynomial exactness of the reconstruction");
  add_common(cr, rec_o);
  cr->add_option("--points", points, "random points per unit class");
  cr->add_option("--seed", seed, "random seed");

  auto* dg = app.add_subcommand("dump-grid", "cut-cell classification and merge map as CSV");
  add_common(dg, grid_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) return cmd_run(run_o, dump_times, dump_recon);
    if (*conv) return cmd_converge(conv_o, format);
    if (*cq) return cmd_check_quadrature(kappas, patches, seed);
    if (*cr) return cmd_check_reconstruction(rec_o, points, seed);
    if (*dg) return cmd_dump_grid(grid_o);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
