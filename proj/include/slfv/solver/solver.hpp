#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "slfv/boundary/intersect.hpp"
#include "slfv/geometry/cut_cell_grid.hpp"
#include "slfv/quadrature/cell_rule.hpp"
#include "slfv/reconstruction/reconstructor.hpp"
#include "slfv/solver/problem.hpp"

namespace slfv {

/// Cell averages at time t, one per unit.
struct SolverState {
  int step{0};
  double t{0.0};
  std::vector<double> rho;
};

struct StepDiagnostics {
  int n{0};
  double t{0.0};
  double mass_rel_err{0.0};
  BoundaryStats boundary;
};

struct RunResult {
  SolverState state;
  std::vector<StepDiagnostics> diagnostics;
  BoundaryStats boundary;
  int steps{0};
  double k{0.0};
  double setup_seconds{0.0};
  double step_seconds{0.0};
};

/// Semi-Lagrangian finite-volume solver on a fixed cut-cell grid.
class Solver {
 public:
  Solver(ProblemSpec spec, SolverConfig cfg) : spec_(std::move(spec)), cfg_(cfg), params_(order_params(cfg_)) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!(cfg_.h > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid size h must be positive");
    if (!spec_.velocity.fn && !spec_.velocity.is_zero) throw Error(ErrorCode::InvalidArgument, "velocity missing");
    if (!spec_.initial.fn && !spec_.initial.is_zero) throw Error(ErrorCode::InvalidArgument, "initial data missing");
    build_geometry();
    rules_ = build_cell_rules(grid_, params_.m_pure, params_.m_interface);
    recon_ = std::make_unique<Reconstructor>(grid_, rules_, params_.q, cfg_.cond_cap, spec_.boundary.has_value(),
                                             params_.m_boundary);
    u_max_ = spec_.velocity.max_speed > 0.0 ? spec_.velocity.max_speed : estimate_speed(false);
    k_ = nominal_step();
    setup_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  const ProblemSpec& problem() const { return spec_; }
  const SolverConfig& config() const { return cfg_; }
  const OrderParams& params() const { return params_; }
  const CutCellGrid& grid() const { return grid_; }
  const std::vector<CellQuadrature>& rules() const { return rules_; }
  const Reconstructor& reconstructor() const { return *recon_; }
  const SplinegonDomain* domain() const { return domain_.get(); }
  double time_step() const { return k_; }
  double max_speed() const { return u_max_; }
  double setup_seconds() const { return setup_seconds_; }

  /// Averages of f(., t) over every unit.
  std::vector<double> unit_averages(const ScalarField& f, double t) const {
    std::vector<double> out(grid_.unit_count());
    for (int u = 0; u < grid_.unit_count(); ++u) out[u] = rules_[u].average([&](const Point2& p) { return f(p, t); });
    return out;
  }

  SolverState init_state() const { return {0, 0.0, unit_averages(spec_.initial, 0.0)}; }

  double mass(const SolverState& st) const {
    double m = 0.0;
    for (int u = 0; u < grid_.unit_count(); ++u) m += grid_.unit_volume(u) * st.rho[u];
    return m;
  }

  /// Relative mass change with respect to a reference (initial) mass.
  static double mass_diagnostic(double mass_now, double mass_initial) {
    if (mass_initial == 0.0) throw Error(ErrorCode::ZeroInitialMass, "initial mass is zero");
    return (mass_now - mass_initial) / mass_initial;
  }

  /// Translates a point into the fundamental periodic box.
  Point2 wrap_periodic(Point2 p) const {
    const double lx = spec_.box_hi.x - spec_.box_lo.x, ly = spec_.box_hi.y - spec_.box_lo.y;
    p.x = spec_.box_lo.x + std::fmod(p.x - spec_.box_lo.x, lx);
    p.y = spec_.box_lo.y + std::fmod(p.y - spec_.box_lo.y, ly);
    if (p.x < spec_.box_lo.x) p.x += lx;
    if (p.y < spec_.box_lo.y) p.y += ly;
    if (p.x >= spec_.box_hi.x) p.x = spec_.box_lo.x;
    if (p.y >= spec_.box_hi.y) p.y = spec_.box_lo.y;
    return p;
  }

  /// Point location in the (non-periodic) domain, using cell classes first.
  bool inside(const Point2& p) const {
    if (spec_.domain_kind == DomainKind::PeriodicRectangle) return true;
    if (spec_.domain_kind == DomainKind::Rectangle)
      return p.x > spec_.box_lo.x && p.x < spec_.box_hi.x && p.y > spec_.box_lo.y && p.y < spec_.box_hi.y;
    const auto c = grid_.spec().locate(p);
    if (!c) return false;
    switch (grid_.cell(*c).cls) {
      case CellClass::Pure: return true;
      case CellClass::Empty: return false;
      default: return domain_->contains(p);
    }
  }

  /// Unit whose polynomial evaluates the point: the unit of the containing
  /// cell, or the nearest nonempty one for points in empty cells.
  int locate_unit(const Point2& p) const {
    const GridSpec& g = grid_.spec();
    int i = std::clamp(static_cast<int>(std::floor((p.x - g.origin.x) / g.h)), 0, g.nx - 1);
    int j = std::clamp(static_cast<int>(std::floor((p.y - g.origin.y) / g.h)), 0, g.ny - 1);
    const int u = grid_.unit_of_cell(g.index(i, j));
    if (u >= 0) return u;
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int r = 1; r <= 4 && best < 0; ++r)
      for (int dj = -r; dj <= r; ++dj)
        for (int di = -r; di <= r; ++di) {
          if (!g.in_range(i + di, j + dj)) continue;
          const int c = g.index(i + di, j + dj);
          const int v = grid_.unit_of_cell(c);
          if (v < 0) continue;
          const double d = distance(g.center(c), p);
          if (d < best_d) {
            best_d = d;
            best = v;
          }
        }
    if (best < 0) throw Error(ErrorCode::PreimageUnresolvable, "no nonempty cell near the preimage");
    return best;
  }

  /// One step from st.t to st.t + k. Reads only the time-n averages.
  BoundaryStats step(SolverState& st, double k) const {
    const double tn = st.t, t1 = st.t + k;
    const int U = grid_.unit_count();
    std::vector<double> next(U);
    BoundaryStats stats;
    const RKScheme& rk = *params_.rk;

    if (spec_.velocity.is_zero) {
      // Preimages coincide with their anchors: averages only pick up the source.
      for (int u = 0; u < U; ++u) {
        double add = 0.0;
        if (!spec_.source.is_zero) {
          add = rules_[u].average([&](const Point2& x) {
            double a = 0.0;
            for (int i = 0; i < rk.stages(); ++i) a += rk.b[i] * spec_.source(x, tn + rk.c[i] * k);
            return k * a;
          });
        }
        next[u] = st.rho[u] + add;
      }
      st.rho = std::move(next);
      st.t = t1;
      ++st.step;
      return stats;
    }

    std::vector<double> bvals(U, 0.0);
    if (spec_.boundary)
      for (int u = 0; u < U; ++u)
        if (const auto* br = recon_->boundary_rule_of(u))
          bvals[u] = br->average([&](const Point2& p) { return (*spec_.boundary)(p, tn); });
    Eigen::MatrixXd coeffs;
    recon_->compute(st.rho, bvals, coeffs);

    std::exception_ptr failure;
    std::mutex mu;
#ifdef _OPENMP
    const int nthreads = std::max(1, cfg_.threads);
#pragma omp parallel num_threads(nthreads)
#endif
    {
      BoundaryStats local;
#ifdef _OPENMP
#pragma omp for schedule(dynamic, 64)
#endif
      for (int u = 0; u < U; ++u) {
        try {
          const auto& rule = rules_[u];
          double acc = 0.0;
          for (std::size_t m = 0; m < rule.nodes.size(); ++m)
            acc += rule.weights[m] * node_value(rule.nodes[m], t1, k, coeffs, local);
          next[u] = acc;
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
      std::lock_guard<std::mutex> lock(mu);
      stats.merge(local);
    }
    if (failure) std::rethrow_exception(failure);
    st.rho = std::move(next);
    st.t = t1;
    ++st.step;
    return stats;
  }

  /// Runs to the final time with N_T = ceil(T / k) steps, the last one
  /// shortened to land on T. The callback sees every new state.
  RunResult run(const std::function<void(const SolverState&)>& on_step = {}) const {
    RunResult res;
    res.k = k_;
    res.setup_seconds = setup_seconds_;
    res.state = init_state();
    const double T = spec_.final_time;
    const double m0 = mass(res.state);
    if (on_step) on_step(res.state);
    if (!(T > 0.0)) return res;
    const int nsteps = std::max(1, static_cast<int>(std::ceil(T / k_ - 1e-9)));
    const auto t0 = std::chrono::steady_clock::now();
    for (int n = 0; n < nsteps; ++n) {
      const double k = n + 1 == nsteps ? T - n * k_ : k_;
      const auto stats = step(res.state, k);
      if (n + 1 == nsteps) res.state.t = T;
      res.boundary.merge(stats);
      res.diagnostics.push_back(
          {res.state.step, res.state.t, m0 != 0.0 ? mass_diagnostic(mass(res.state), m0) : 0.0, stats});
      if (on_step) on_step(res.state);
    }
    res.step_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.steps = nsteps;
    return res;
  }

 private:
  void build_geometry() {
    const double h = cfg_.h;
    switch (spec_.domain_kind) {
      case DomainKind::PeriodicRectangle:
      case DomainKind::Rectangle: {
        const Point2 ext = spec_.box_hi - spec_.box_lo;
        GridSpec g;
        g.origin = spec_.box_lo;
        g.h = h;
        g.nx = static_cast<int>(std::llround(ext.x / h));
        g.ny = static_cast<int>(std::llround(ext.y / h));
        if (g.nx < 1 || g.ny < 1 || std::abs(g.nx * h - ext.x) > 1e-9 * ext.x || std::abs(g.ny * h - ext.y) > 1e-9 * ext.y)
          throw Error(ErrorCode::GridMismatch, "box extents must be integer multiples of h");
        // Make h consistent with the box to round-off.
        g.h = ext.x / g.nx;
        cfg_.h = g.h;
        const bool periodic = spec_.domain_kind == DomainKind::PeriodicRectangle;
        grid_ = box_grid(g, periodic);
        if (!periodic) domain_ = std::make_shared<SplinegonDomain>(rectangle_domain(spec_.box_lo, spec_.box_hi));
        break;
      }
      case DomainKind::Splinegon: {
        if (!spec_.splinegon) throw Error(ErrorCode::InvalidArgument, "splinegon domain missing");
        domain_ = spec_.splinegon;
        grid_ = merge_small_cells(classify_cells(*domain_, grid_for_domain(*domain_, h, cfg_.grid_offset)), cfg_.merge_eps);
        break;
      }
    }
  }

  double estimate_speed(bool sum_components) const {
    double best = 0.0;
    const GridSpec& g = grid_.spec();
    const int stride = std::max(1, g.nx / 64);
    for (int s = 0; s <= 8; ++s) {
      const double t = spec_.final_time * s / 8.0;
      for (int j = 0; j < g.ny; j += stride)
        for (int i = 0; i < g.nx; i += stride) {
          const Vec2 v = spec_.velocity(g.center(i, j), t);
          best = std::max(best, sum_components ? std::abs(v.x) + std::abs(v.y) : norm(v));
        }
    }
    return 1.1 * best;
  }

  double nominal_step() const {
    if (cfg_.k > 0.0) return cfg_.k;
    if (cfg_.k_over_h > 0.0) return cfg_.k_over_h * cfg_.h;
    if (cfg_.cfl > 0.0) {
      const double speed = spec_.speed_sum > 0.0 ? spec_.speed_sum : estimate_speed(true) / 1.1;
      if (!(speed > 0.0)) throw Error(ErrorCode::InvalidArgument, "CFL rule needs a nonzero velocity");
      return cfg_.cfl * cfg_.h / speed;
    }
    throw Error(ErrorCode::InvalidArgument, "time step rule missing: set k, k/h or CFL");
  }

  double eval_at(const Eigen::MatrixXd& coeffs, const Point2& p) const {
    return recon_->evaluate(coeffs, locate_unit(p), p);
  }

  // Point value at t1 of the node x: SLFV update along its pathline.
  double node_value(const Point2& x, double t1, double k, const Eigen::MatrixXd& coeffs, BoundaryStats& stats) const {
    const RKScheme& rk = *params_.rk;
    const bool need_stages = !spec_.source.is_zero;
    const PathlineTrace tr = backtrack(spec_.velocity, x, t1, k, rk, cfg_.substeps, need_stages);
    Point2 p = tr.preimage;
    if (spec_.domain_kind == DomainKind::PeriodicRectangle) {
      p = wrap_periodic(p);
      return advance_density(tr, eval_at(coeffs, p), spec_.source, rk);
    }
    if (inside(p)) return advance_density(tr, eval_at(coeffs, p), spec_.source, rk);

    const BoundaryPoint bp = closest_boundary_point(*domain_, p);
    if (bp.distance < 1e-12 * domain_->diameter()) {
      ++stats.projections;
      return advance_density(tr, eval_at(coeffs, bp.point), spec_.source, rk);
    }
    if (!spec_.boundary) throw Error(ErrorCode::PreimageUnresolvable, "preimage left the domain but no inflow data");
    Point2 fine;
    auto in = [this](const Point2& q) { return inside(q); };
    const auto hit = intersect_pathline(spec_.velocity, x, t1, k, *domain_, rk, grid_.h(), u_max_, in, cfg_.newton, &fine);
    if (hit) {
      stats.add(*hit, t1 - k, t1);
      return advance_from_boundary(*hit, spec_.velocity, *spec_.boundary, spec_.source, rk, t1, spec_.source.is_zero,
                                   cfg_.substeps);
    }
    // The substepped path stays inside: use its preimage and integrate the
    // source forward along the same substeps.
    ++stats.fine_fallbacks;
    double rho = eval_at(coeffs, fine);
    if (!spec_.source.is_zero) {
      const int n_sub = std::max(1, static_cast<int>(std::ceil(k * u_max_ / grid_.h())));
      const double dt = k / n_sub;
      Point2 q = fine;
      std::array<Point2, kMaxStages> stages;
      for (int s = 0; s < n_sub; ++s) {
        const double ts = t1 - k + s * dt;
        stage_points(spec_.velocity, rk, q, ts, dt, 1, stages);
        double a = 0.0;
        for (int i = 0; i < rk.stages(); ++i) a += rk.b[i] * spec_.source(stages[i], ts + rk.c[i] * dt);
        rho += dt * a;
        q = rk_step(spec_.velocity, rk, q, ts, dt);
      }
    }
    return rho;
  }

  ProblemSpec spec_;
  SolverConfig cfg_;
  OrderParams params_;
  CutCellGrid grid_;
  std::shared_ptr<const SplinegonDomain> domain_;
  std::vector<CellQuadrature> rules_;
  std::unique_ptr<Reconstructor> recon_;
  double u_max_{0.0};
  double k_{0.0};
  double setup_seconds_{0.0};
};

}  // namespace slfv
