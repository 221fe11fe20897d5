#pragma once

#include <memory>
#include <optional>

#include "slfv/boundary/intersect.hpp"
#include "slfv/core/error.hpp"
#include "slfv/flow/fields.hpp"
#include "slfv/flow/rk_scheme.hpp"
#include "slfv/geometry/domain.hpp"
#include "slfv/quadrature/cell_rule.hpp"

namespace slfv {

enum class DomainKind { Rectangle, PeriodicRectangle, Splinegon };

/// Advection problem: domain, velocity, source, initial and inflow data.
struct ProblemSpec {
  DomainKind domain_kind{DomainKind::Rectangle};
  Point2 box_lo{0.0, 0.0};
  Point2 box_hi{1.0, 1.0};
  std::shared_ptr<const SplinegonDomain> splinegon;

  VelocityField velocity;
  SourceField source{SourceField::zero()};
  ScalarField initial;
  std::optional<BoundaryConditionField> boundary;  ///< inflow data; absent for periodic problems
  double final_time{1.0};
  double speed_sum{0.0};  ///< max|u| + max|v| for the CFL rule; estimated when 0
};

/// Numerical parameters. Zero-valued entries fall back to the defaults of
/// the order table.
struct SolverConfig {
  int order{4};
  double h{0.0};
  double k{0.0};         ///< explicit time step
  double k_over_h{0.0};  ///< k = k_over_h * h
  double cfl{0.0};       ///< k = cfl * h / (max|u| + max|v|)
  double merge_eps{0.1};
  Vec2 grid_offset{};    ///< splinegon grids: origin moved by -offset * h from the bounding-box corner
  int q{0};
  int m_pure{0};
  int m_interface{0};
  int m_boundary{0};
  int substeps{1};
  double cond_cap{1e8};
  NewtonOptions newton;
  int threads{1};
};

/// Scheme parameters bound to a solver order.
struct OrderParams {
  int q;
  int m_pure;
  int m_interface;
  int m_boundary;
  const RKScheme* rk;
};

inline OrderParams order_params(const SolverConfig& cfg) {
  OrderParams p{};
  p.rk = &rk_scheme(cfg.order);
  p.q = cfg.q > 0 ? cfg.q : cfg.order;
  p.m_pure = cfg.m_pure > 0 ? cfg.m_pure : pure_gauss_points(cfg.order);
  p.m_interface = cfg.m_interface > 0 ? cfg.m_interface : interface_gauss_points(cfg.order);
  p.m_boundary = cfg.m_boundary > 0 ? cfg.m_boundary : p.m_interface;
  if (p.m_pure < pure_gauss_points(cfg.order) || p.m_interface < interface_gauss_points(cfg.order))
    throw Error(ErrorCode::InvalidArgument, "quadrature node counts below the minimum for this order");
  return p;
}

}  // namespace slfv
