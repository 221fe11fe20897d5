#pragma once

#include <cmath>
#include <vector>

#include "slfv/core/error.hpp"
#include "slfv/geometry/cut_cell_grid.hpp"
#include "slfv/geometry/partition.hpp"
#include "slfv/quadrature/gauss_legendre.hpp"

namespace slfv {

/// The blending map of a patch; M(xi, eta) and its Jacobian.
using PatchMap = CurvedPatch;

inline const PatchMap& blending_map(const CurvedPatch& p) { return p; }

/// Nodes with integral weights.
struct QuadratureRule {
  std::vector<Point2> nodes;
  std::vector<double> weights;

  double sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) s += weights[k] * f(nodes[k]);
    return s;
  }
};

/// Rule for the cell average: weights sum to one. The cell volume is kept
/// alongside for mass and norm computations.
struct CellQuadrature {
  std::vector<Point2> nodes;
  std::vector<double> weights;
  double volume{0.0};

  template <class F>
  double average(F&& f) const {
    double s = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) s += weights[k] * f(nodes[k]);
    return s;
  }
};

/// Tensor Gauss rule pulled back through the blending map: weights are
/// w_i w_j |J(xi_i, eta_j)|.
inline QuadratureRule patch_rule(const CurvedPatch& patch, int m_xi, int m_eta) {
  const auto& gx = gauss_legendre(m_xi);
  const auto& gy = gauss_legendre(m_eta);
  QuadratureRule r;
  r.nodes.reserve(static_cast<std::size_t>(m_xi) * m_eta);
  r.weights.reserve(r.nodes.capacity());
  for (int i = 0; i < m_xi; ++i)
    for (int j = 0; j < m_eta; ++j) {
      Point2 m;
      Vec2 a, b;
      patch.map(gx.nodes[i], gy.nodes[j], m, a, b);
      const double det = cross(a, b);
      if (!(det > 0.0)) throw Error(ErrorCode::NegativeJacobian, "patch map is not orientation preserving");
      r.nodes.push_back(m);
      r.weights.push_back(gx.weights[i] * gy.weights[j] * det);
    }
  return r;
}

/// Gauss points per direction on pure cells for a given order.
inline int pure_gauss_points(int order) {
  switch (order) {
    case 4: return 3;
    case 6: return 4;
    case 8: return 5;
    default: throw Error(ErrorCode::UnsupportedOrder, "order must be 4, 6 or 8");
  }
}

/// Gauss points per direction on curved patches: ceil((order + 2) * 3 / 2),
/// exact on cubic-edged patches for polynomials of total degree <= order.
inline int interface_gauss_points(int order) {
  if (order != 4 && order != 6 && order != 8) throw Error(ErrorCode::UnsupportedOrder, "order must be 4, 6 or 8");
  return ((order + 2) * 3 + 1) / 2;
}

/// Integral rule of one grid cell (pure: tensor rule on the square;
/// interface: patch rules over the partition of its loop).
inline QuadratureRule cell_integral_rule(const CutCellGrid& grid, int idx, int m_pure, int m_interface) {
  const auto& cell = grid.cell(idx);
  const GridSpec& g = grid.spec();
  QuadratureRule r;
  if (cell.cls == CellClass::Pure) {
    const auto& gr = gauss_legendre(m_pure);
    const Point2 lo = g.lo(g.col(idx), g.row(idx));
    const double half = 0.5 * g.h;
    for (int i = 0; i < m_pure; ++i)
      for (int j = 0; j < m_pure; ++j) {
        r.nodes.push_back({lo.x + half * (1.0 + gr.nodes[i]), lo.y + half * (1.0 + gr.nodes[j])});
        r.weights.push_back(gr.weights[i] * gr.weights[j] * half * half);
      }
  } else if (cell.cls == CellClass::Interface) {
    std::vector<CubicSegment> loop;
    for (const auto& e : cell.loop) loop.push_back(e.seg);
    for (const auto& p : partition_patches(loop)) {
      const auto pr = patch_rule(p, m_interface, m_interface);
      r.nodes.insert(r.nodes.end(), pr.nodes.begin(), pr.nodes.end());
      r.weights.insert(r.weights.end(), pr.weights.begin(), pr.weights.end());
    }
  }
  return r;
}

/// Average rule of a unit (a cell, or a host with its merged members).
inline CellQuadrature cell_rule(const CutCellGrid& grid, int unit, int m_pure, int m_interface) {
  CellQuadrature q;
  q.volume = grid.unit_volume(unit);
  double total = 0.0;
  for (int c : grid.unit_members(unit)) {
    const auto r = cell_integral_rule(grid, c, m_pure, m_interface);
    q.nodes.insert(q.nodes.end(), r.nodes.begin(), r.nodes.end());
    q.weights.insert(q.weights.end(), r.weights.begin(), r.weights.end());
    total += r.sum();
  }
  for (double& w : q.weights) w /= total;
  return q;
}

inline std::vector<CellQuadrature> build_cell_rules(const CutCellGrid& grid, int m_pure, int m_interface) {
  std::vector<CellQuadrature> rules(grid.unit_count());
  for (int u = 0; u < grid.unit_count(); ++u) rules[u] = cell_rule(grid, u, m_pure, m_interface);
  return rules;
}

/// Average rule over a union of boundary arcs: Gauss nodes on each segment
/// with arc-length weights, normalized to sum to one.
struct BoundaryRule {
  std::vector<Point2> nodes;
  std::vector<double> weights;
  double length{0.0};

  template <class F>
  double average(F&& f) const {
    double s = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) s += weights[k] * f(nodes[k]);
    return s;
  }
};

inline BoundaryRule boundary_rule(const std::vector<CubicSegment>& arcs, int m) {
  const auto& gr = gauss_legendre(m);
  BoundaryRule b;
  for (const auto& s : arcs)
    for (int i = 0; i < m; ++i) {
      const double l = 0.5 * (1.0 + gr.nodes[i]);
      const double w = 0.5 * gr.weights[i] * norm(s.deriv(l));
      b.nodes.push_back(s.eval(l));
      b.weights.push_back(w);
      b.length += w;
    }
  if (!(b.length > 0.0)) throw Error(ErrorCode::InvalidArgument, "boundary rule over zero-length arcs");
  for (double& w : b.weights) w /= b.length;
  return b;
}

/// Cut-boundary arcs of a unit (boundary edges of all interface members).
inline std::vector<CubicSegment> unit_cut_boundary(const CutCellGrid& grid, int unit) {
  std::vector<CubicSegment> arcs;
  for (int c : grid.unit_members(unit))
    for (const auto& e : grid.cell(c).loop)
      if (e.on_boundary) arcs.push_back(e.seg);
  return arcs;
}

}  // namespace slfv
