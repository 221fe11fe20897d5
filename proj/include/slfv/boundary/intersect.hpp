#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "slfv/core/error.hpp"
#include "slfv/flow/pathline.hpp"
#include "slfv/geometry/domain.hpp"

namespace slfv {

/// Space-time point where a backward pathline leaves the domain.
struct BoundaryHit {
  Point2 x;
  double t{0.0};
  double s{0.0};  ///< global parameter on the hit curve
  int curve{-1};
  int iterations{0};
  double residual{0.0};
  bool bisection{false};
};

struct NewtonOptions {
  double tol_rel{1e-12};  ///< residual tolerance relative to the domain diameter
  int max_iter{30};
};

/// Aggregated statistics of boundary treatment over a step or a run.
struct BoundaryStats {
  long hits{0};
  long bisections{0};
  long projections{0};    ///< round-off exits snapped back to the boundary
  long fine_fallbacks{0};  ///< exits that vanished on the substepped path
  long outside_step{0};     ///< hits with t* outside (t_n, t_n+1)
  int max_iterations{0};
  double max_residual{0.0};

  void add(const BoundaryHit& h, double t_n, double t_n1) {
    ++hits;
    bisections += h.bisection ? 1 : 0;
    outside_step += h.t > t_n && h.t < t_n1 ? 0 : 1;
    max_iterations = std::max(max_iterations, h.iterations);
    max_residual = std::max(max_residual, h.residual);
  }
  void merge(const BoundaryStats& o) {
    hits += o.hits;
    bisections += o.bisections;
    projections += o.projections;
    fine_fallbacks += o.fine_fallbacks;
    outside_step += o.outside_step;
    max_iterations = std::max(max_iterations, o.max_iterations);
    max_residual = std::max(max_residual, o.max_residual);
  }
};

/// True iff the preimage lies outside the domain.
inline bool detect_exit(const Point2& preimage, const SplinegonDomain& dom) { return !dom.contains(preimage); }

/// Locates the latest crossing of the backward pathline from (x, t_end)
/// with the boundary during (t_end - k, t_end).
///
/// The path is first marched backward in ceil(k u_max / h) substeps to
/// bracket the crossing. Newton's method then solves
/// gamma(s) - phi(t) = 0 for (s, t) with Jacobian [gamma'(s), -u(phi, t)],
/// falling back to bisection in t whenever an iterate leaves the bracket.
/// Returns nullopt when the substepped path never leaves the domain; the
/// substepped preimage is then written to `fine_preimage`.
template <class Field, class Inside>
std::optional<BoundaryHit> intersect_pathline(const Field& u, const Point2& x, double t_end, double k,
                                              const SplinegonDomain& dom, const RKScheme& rk, double h, double u_max,
                                              const Inside& inside, const NewtonOptions& opt = {},
                                              Point2* fine_preimage = nullptr) {
  const int n_sub = u_max > 0.0 ? std::max(1, static_cast<int>(std::ceil(k * u_max / h))) : 8;
  const double dt = k / n_sub;
  Point2 p_in = x;
  double t_in = t_end;
  double t_out = t_end;
  bool found = false;
  for (int j = 1; j <= n_sub; ++j) {
    const double t = t_end - j * dt;
    const Point2 p = rk_step(u, rk, p_in, t_in, (j == n_sub ? (t_end - k) : t) - t_in);
    if (!inside(p)) {
      t_out = j == n_sub ? t_end - k : t;
      found = true;
      break;
    }
    p_in = p;
    t_in = j == n_sub ? t_end - k : t;
  }
  if (!found) {
    if (fine_preimage) *fine_preimage = p_in;
    return std::nullopt;
  }

  const double tol = opt.tol_rel * dom.diameter();
  auto phi = [&](double t) { return rk_step(u, rk, p_in, t_in, t - t_in); };
  double lo = t_out, hi = t_in;  // phi(lo) outside, phi(hi) inside

  BoundaryHit hit;
  auto newton = [&](double t0) -> bool {
    double t = t0;
    Point2 P = phi(t);
    BoundaryPoint bp = closest_boundary_point(dom, P);
    const JordanSplineCurve* curve = &dom.curves()[bp.curve];
    hit.curve = bp.curve;
    double s = bp.s();
    for (int it = 0; it < opt.max_iter; ++it) {
      ++hit.iterations;
      const Point2 g = curve->eval(s);
      const Vec2 F = g - P;
      const double res = norm(F);
      if (res < tol) {
        hit.x = g;
        hit.t = t;
        hit.s = curve->wrap(s);
        hit.residual = res;
        return true;
      }
      if (res > 10.0 * tol) {
        if (inside(P))
          hi = std::min(hi, t);
        else
          lo = std::max(lo, t);
      }
      const Vec2 gs = curve->deriv(s);
      const Vec2 up = u(P, t);
      const double det = cross(gs, -up);
      double s_new = s, t_new = t;
      if (det != 0.0 && std::isfinite(det)) {
        // Cramer's rule for [gs, -up] (ds, dt) = -F.
        s_new = s + cross(-F, -up) / det;
        t_new = t + cross(gs, -F) / det;
      }
      if (!(t_new > lo && t_new < hi) || !std::isfinite(s_new) || det == 0.0) {
        t_new = 0.5 * (lo + hi);
        hit.bisection = true;
        P = phi(t_new);
        bp = closest_boundary_point(dom, P);
        curve = &dom.curves()[bp.curve];
        hit.curve = bp.curve;
        s = bp.s();
        t = t_new;
        continue;
      }
      s = s_new;
      t = t_new;
      P = phi(t);
    }
    return false;
  };

  if (newton(0.5 * (lo + hi))) return hit;
  // Bisection on the in/out sign to shrink the bracket, then restart Newton.
  hit.bisection = true;
  for (int it = 0; it < 60 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double tm = 0.5 * (lo + hi);
    if (inside(phi(tm)))
      hi = tm;
    else
      lo = tm;
  }
  if (newton(0.5 * (lo + hi))) return hit;
  throw Error(ErrorCode::NoConvergence, "pathline-boundary intersection did not converge");
}

/// rho_bc(x*, t*) + k* sum_j b_j S(X_j, t* + c_j k*) with X_j the points
/// of the forward pathline from the hit.
template <class Field, class Source, class BC>
double advance_from_boundary(const BoundaryHit& hit, const Field& u, const BC& bc, const Source& source,
                             const RKScheme& rk, double t_end, bool source_is_zero = false, int substeps = 1) {
  const double ks = t_end - hit.t;
  const double rho = bc(hit.x, hit.t);
  if (source_is_zero || !(ks > 0.0)) return rho;
  std::array<Point2, kMaxStages> stages;
  stage_points(u, rk, hit.x, hit.t, ks, substeps, stages);
  double acc = 0.0;
  for (int i = 0; i < rk.stages(); ++i)
    if (rk.b[i] != 0.0) acc += rk.b[i] * source(stages[i], hit.t + rk.c[i] * ks);
  return rho + ks * acc;
}

}  // namespace slfv
