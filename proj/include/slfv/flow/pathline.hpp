#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "slfv/core/error.hpp"
#include "slfv/flow/fields.hpp"
#include "slfv/flow/rk_scheme.hpp"

namespace slfv {

inline constexpr int kMaxStages = 13;

/// One explicit RK step of dx/dt = u(x, t) from (x, t) with signed step dt.
/// Stage positions are written to `stages` when given.
template <class Field>
Point2 rk_step(const Field& u, const RKScheme& rk, const Point2& x, double t, double dt,
               std::array<Point2, kMaxStages>* stages = nullptr) {
  std::array<Vec2, kMaxStages> K;
  const int s = rk.stages();
  for (int i = 0; i < s; ++i) {
    Point2 xi = x;
    for (int j = 0; j < i; ++j) {
      const double a = rk.a[i][j];
      if (a != 0.0) xi += (dt * a) * K[j];
    }
    if (stages) (*stages)[i] = xi;
    K[i] = u(xi, t + rk.c[i] * dt);
    if (!std::isfinite(K[i].x) || !std::isfinite(K[i].y))
      throw Error(ErrorCode::NonFiniteVelocity, "velocity is not finite");
  }
  Point2 out = x;
  for (int i = 0; i < s; ++i)
    if (rk.b[i] != 0.0) out += (dt * rk.b[i]) * K[i];
  return out;
}

/// Numerical flow map: position at t0 + sigma of the particle at x at t0.
template <class Field>
Point2 flow_map_point(const Field& u, const Point2& x, double t0, double sigma, const RKScheme& rk, int substeps = 1) {
  if (sigma == 0.0) return x;
  if (substeps < 1) throw Error(ErrorCode::InvalidArgument, "substeps must be positive");
  const double dt = sigma / substeps;
  Point2 p = x;
  for (int n = 0; n < substeps; ++n) p = rk_step(u, rk, p, t0 + n * dt, dt);
  return p;
}

/// Points of the numerical pathline through (x0, t0) at the times
/// t0 + c_i dt, each integrated from x0 with the given substeps. Stages with
/// equal abscissae share one point.
template <class Field>
void stage_points(const Field& u, const RKScheme& rk, const Point2& x0, double t0, double dt, int substeps,
                  std::array<Point2, kMaxStages>& out) {
  for (int i = 0; i < rk.stages(); ++i) {
    int same = -1;
    for (int j = 0; j < i && same < 0; ++j)
      if (rk.c[j] == rk.c[i]) same = j;
    out[i] = same >= 0 ? out[same] : flow_map_point(u, x0, t0, rk.c[i] * dt, rk, substeps);
  }
}

/// Backward pathline from an anchor at t_end over one time step k.
struct PathlineTrace {
  Point2 anchor;
  double t_end{0.0};
  double k{0.0};
  Point2 preimage;
  int stage_count{0};
  std::array<Point2, kMaxStages> stages{};  ///< pathline points at t_end - k + c_i k
};

/// Traces x back over [t_end - k, t_end]. With `with_stages`, the pathline
/// points at t_end - k + c_i k used by the density update are integrated
/// forward from the preimage.
template <class Field>
PathlineTrace backtrack(const Field& u, const Point2& x, double t_end, double k, const RKScheme& rk, int substeps = 1,
                        bool with_stages = true) {
  if (!(k > 0.0)) throw Error(ErrorCode::InvalidArgument, "time step must be positive");
  PathlineTrace tr;
  tr.anchor = x;
  tr.t_end = t_end;
  tr.k = k;
  tr.preimage = flow_map_point(u, x, t_end, -k, rk, substeps);
  if (with_stages) {
    tr.stage_count = rk.stages();
    stage_points(u, rk, tr.preimage, t_end - k, k, substeps, tr.stages);
  }
  return tr;
}

/// rho0 + k sum_j b_j S(X_j, t_n + c_j k) over the recorded stages.
template <class Source>
double advance_density(const PathlineTrace& tr, double rho0, const Source& source, const RKScheme& rk) {
  if (tr.stage_count == 0) return rho0;
  const double tn = tr.t_end - tr.k;
  double acc = 0.0;
  for (int i = 0; i < rk.stages(); ++i)
    if (rk.b[i] != 0.0) acc += rk.b[i] * source(tr.stages[i], tn + rk.c[i] * tr.k);
  return rho0 + tr.k * acc;
}

inline double advance_density(const PathlineTrace& tr, double rho0, const SourceField& source, const RKScheme& rk) {
  if (source.is_zero) return rho0;
  return advance_density<SourceField>(tr, rho0, source, rk);
}

}  // namespace slfv
