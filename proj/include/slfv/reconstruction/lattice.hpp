#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "slfv/core/error.hpp"
#include "slfv/geometry/cut_cell_grid.hpp"
#include "slfv/quadrature/cell_rule.hpp"
#include "slfv/reconstruction/basis.hpp"
#include "slfv/reconstruction/fit.hpp"

namespace slfv {

inline constexpr double kMaxLatticeWeight = 2.0;

/// Row weight of a lattice member at index distance d from the target.
inline double lattice_weight(double d) { return d <= 0.0 ? kMaxLatticeWeight : std::min(1.0 / d, kMaxLatticeWeight); }

/// Cells (as units) used to reconstruct the polynomial of one target unit.
struct PoisedLattice {
  int target{-1};
  std::vector<int> members;  ///< unit ids; the target comes first
  std::vector<double> weights;
  bool has_boundary_row{false};
  double boundary_weight{kMaxLatticeWeight};
  bool standard{false};
  double condition{0.0};
};

namespace detail {

// Incremental rank test over rows with Gram-Schmidt (two passes).
class RowSpan {
 public:
  explicit RowSpan(int n) : n_(n) {}
  int rank() const { return static_cast<int>(basis_.size()); }
  bool try_add(Eigen::VectorXd v, double rel_tol) {
    const double n0 = v.norm();
    if (!(n0 > 0.0)) return false;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis_) v -= b.dot(v) * b;
    const double n1 = v.norm();
    if (n1 <= rel_tol * n0 || rank() >= n_) return false;
    basis_.push_back(v / n1);
    return true;
  }

 private:
  int n_;
  std::vector<Eigen::VectorXd> basis_;
};

inline Eigen::VectorXd degree_scaling(const MonomialBasis& basis) {
  const double r = std::max(1.0, 0.5 * std::sqrt(static_cast<double>(basis.size())));
  Eigen::VectorXd s(basis.size());
  for (int k = 0; k < basis.size(); ++k) {
    const auto [a, b] = basis.exponents()[k];
    s[k] = std::pow(r, -(a + b));
  }
  return s;
}

// Exact basis averages over the unit square centered at (di, dj) in local units.
inline Eigen::VectorXd offset_averages(const MonomialBasis& basis, int di, int dj) {
  const auto& g = gauss_legendre(basis.degree() / 2 + 1);
  QuadratureRule r;
  for (int i = 0; i < g.size(); ++i)
    for (int j = 0; j < g.size(); ++j) {
      r.nodes.push_back({di + 0.5 * g.nodes[i], dj + 0.5 * g.nodes[j]});
      r.weights.push_back(0.25 * g.weights[i] * g.weights[j]);
    }
  return basis_averages(basis, r, {0.0, 0.0}, 1.0);
}

struct StandardTemplate {
  std::vector<std::pair<int, int>> offsets;
  Eigen::MatrixXd P;
  double condition{0.0};
};

inline StandardTemplate make_standard_template(int q) {
  const MonomialBasis basis(q);
  const int n = basis.size();
  const int r = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))) + 2;
  std::vector<std::pair<int, int>> cand;
  for (int dj = -r; dj <= r; ++dj)
    for (int di = -r; di <= r; ++di) cand.push_back({di, dj});
  std::stable_sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
    const int da = a.first * a.first + a.second * a.second, db = b.first * b.first + b.second * b.second;
    if (da != db) return da < db;
    return std::make_pair(a.second, a.first) < std::make_pair(b.second, b.first);
  });
  const Eigen::VectorXd scale = degree_scaling(basis);
  RowSpan span(n);
  StandardTemplate t;
  for (const auto& [di, dj] : cand) {
    if (span.rank() == n) break;
    if (span.try_add(offset_averages(basis, di, dj).cwiseProduct(scale), 1e-6)) t.offsets.push_back({di, dj});
  }
  if (span.rank() < n) throw Error(ErrorCode::InsufficientCells, "standard stencil search failed");
  Eigen::MatrixXd A(n, n);
  Eigen::VectorXd w(n);
  for (int k = 0; k < n; ++k) {
    A.row(k) = offset_averages(basis, t.offsets[k].first, t.offsets[k].second).transpose();
    w[k] = lattice_weight(std::hypot(t.offsets[k].first, t.offsets[k].second));
  }
  const auto op = build_operator(A, w);
  t.P = op.P;
  t.condition = op.condition;
  return t;
}

}  // namespace detail

/// Shared stencil layout and operator for pure cells away from the boundary.
inline const detail::StandardTemplate& standard_template(int q) {
  static std::mutex mu;
  static std::map<int, detail::StandardTemplate> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(q);
  if (it == cache.end()) it = cache.emplace(q, detail::make_standard_template(q)).first;
  return it->second;
}

/// Standard stencil of a pure unit whose template cells are all pure and
/// unmerged. Throws TouchesBoundary otherwise.
inline PoisedLattice standard_stencil(const CutCellGrid& grid, int unit, int q) {
  const GridSpec& g = grid.spec();
  if (!grid.unit_is_pure(unit)) throw Error(ErrorCode::TouchesBoundary, "target cell is not pure");
  const int host = grid.unit_host(unit);
  const int hi = g.col(host), hj = g.row(host);
  const auto& tmpl = standard_template(q);
  PoisedLattice lat;
  lat.target = unit;
  lat.standard = true;
  lat.condition = tmpl.condition;
  for (const auto& [di, dj] : tmpl.offsets) {
    int i = hi + di, j = hj + dj;
    if (grid.periodic()) {
      i = ((i % g.nx) + g.nx) % g.nx;
      j = ((j % g.ny) + g.ny) % g.ny;
    }
    if (!g.in_range(i, j)) throw Error(ErrorCode::TouchesBoundary, "stencil leaves the grid");
    const int u = grid.unit_of_cell(g.index(i, j));
    if (u < 0 || !grid.unit_is_pure(u)) throw Error(ErrorCode::TouchesBoundary, "stencil touches the boundary");
    lat.members.push_back(u);
    lat.weights.push_back(lattice_weight(std::hypot(di, dj)));
  }
  return lat;
}

/// Rows of the reconstruction matrix for a lattice: basis averages over
/// each member unit in the target's local coordinates.
inline Eigen::MatrixXd lattice_rows(const CutCellGrid& grid, const std::vector<CellQuadrature>& rules,
                                    const MonomialBasis& basis, int target, const std::vector<int>& members) {
  const Point2 c = grid.unit_center(target);
  const double h = grid.h();
  const GridSpec& g = grid.spec();
  Eigen::MatrixXd A(members.size(), basis.size());
  for (std::size_t r = 0; r < members.size(); ++r) {
    Point2 shift{0.0, 0.0};
    if (grid.periodic()) {
      // Minimal-image displacement of the member relative to the target.
      const Point2 d = grid.unit_center(members[r]) - c;
      const double lx = g.nx * h, ly = g.ny * h;
      shift = {-lx * std::round(d.x / lx), -ly * std::round(d.y / ly)};
    }
    A.row(r) = basis_averages(basis, rules[members[r]], c - shift, h).transpose();
  }
  return A;
}

/// Greedy nearest-first lattice over nonempty units: members are added when
/// they raise the rank, then the nearest remaining units are appended up to
/// 2n members. Square lattices from the rank search alone can have Lebesgue
/// constants in the thousands near curved boundaries, which makes the step
/// unstable. Throws RankDeficient if the condition estimate exceeds cond_cap.
inline PoisedLattice boundary_stencil(const CutCellGrid& grid, const std::vector<CellQuadrature>& rules,
                                      const MonomialBasis& basis, int unit, double cond_cap,
                                      const BoundaryRule* boundary = nullptr) {
  const GridSpec& g = grid.spec();
  const int n = basis.size();
  const int host = grid.unit_host(unit);
  const int hi = g.col(host), hj = g.row(host);
  const Eigen::VectorXd scale = detail::degree_scaling(basis);
  const int r0 = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))) + 2;
  Eigen::VectorXd brow;
  if (boundary) brow = basis_averages(basis, *boundary, grid.unit_center(unit), grid.h());

  for (int radius = r0; radius <= 4 * r0; radius *= 2) {
    struct Cand {
      int unit;
      int d2;
      int key;
    };
    std::vector<Cand> cand;
    std::vector<char> seen(grid.unit_count(), 0);
    for (int dj = -radius; dj <= radius; ++dj)
      for (int di = -radius; di <= radius; ++di) {
        int i = hi + di, j = hj + dj;
        if (grid.periodic()) {
          i = ((i % g.nx) + g.nx) % g.nx;
          j = ((j % g.ny) + g.ny) % g.ny;
        }
        if (!g.in_range(i, j)) continue;
        const int u = grid.unit_of_cell(g.index(i, j));
        if (u < 0 || seen[u]) continue;
        seen[u] = 1;
        const int uh = grid.unit_host(u);
        int ei = g.col(uh) - hi, ej = g.row(uh) - hj;
        if (grid.periodic()) {
          ei -= g.nx * static_cast<int>(std::round(static_cast<double>(ei) / g.nx));
          ej -= g.ny * static_cast<int>(std::round(static_cast<double>(ej) / g.ny));
        }
        cand.push_back({u, ei * ei + ej * ej, uh});
      }
    std::stable_sort(cand.begin(), cand.end(), [](const Cand& a, const Cand& b) {
      return a.d2 != b.d2 ? a.d2 < b.d2 : a.key < b.key;
    });

    std::vector<int> all;
    for (const auto& c : cand) all.push_back(c.unit);
    const Eigen::MatrixXd rows = lattice_rows(grid, rules, basis, unit, all);
    detail::RowSpan span(n);
    std::vector<int> chosen;
    std::vector<char> used(cand.size(), 0);
    for (std::size_t k = 0; k < cand.size() && static_cast<int>(chosen.size()) < n; ++k) {
      const bool is_target = cand[k].unit == unit;
      if (span.try_add(rows.row(k).transpose().cwiseProduct(scale), 1e-6) || is_target) {
        chosen.push_back(static_cast<int>(k));
        used[k] = 1;
      }
      if (span.rank() == n && static_cast<int>(chosen.size()) >= n) break;
    }
    if (span.rank() < n || static_cast<int>(chosen.size()) < n) continue;

    auto assemble = [&](Eigen::MatrixXd& A, Eigen::VectorXd& w) {
      const Eigen::Index extra = boundary ? 1 : 0;
      A.resize(static_cast<Eigen::Index>(chosen.size()) + extra, n);
      w.resize(A.rows());
      for (std::size_t r = 0; r < chosen.size(); ++r) {
        A.row(r) = rows.row(chosen[r]);
        w[r] = lattice_weight(std::sqrt(static_cast<double>(cand[chosen[r]].d2)));
      }
      if (boundary) {
        A.row(A.rows() - 1) = brow.transpose();
        w[A.rows() - 1] = kMaxLatticeWeight;
      }
    };
    Eigen::MatrixXd A;
    Eigen::VectorXd w;
    for (std::size_t k = 0; k < cand.size() && static_cast<int>(chosen.size()) < 2 * n; ++k) {
      if (used[k]) continue;
      chosen.push_back(static_cast<int>(k));
      used[k] = 1;
    }
    assemble(A, w);
    const double cond = weighted_condition(A, w);
    if (!(cond <= cond_cap)) throw Error(ErrorCode::RankDeficient, "lattice condition estimate exceeds the cap");
    // Keep the target first.
    std::stable_sort(chosen.begin(), chosen.end(),
                     [&](int a, int b) { return (cand[a].unit == unit) > (cand[b].unit == unit); });
    PoisedLattice lat;
    lat.target = unit;
    lat.has_boundary_row = boundary != nullptr;
    lat.condition = cond;
    for (int k : chosen) {
      lat.members.push_back(cand[k].unit);
      lat.weights.push_back(lattice_weight(std::sqrt(static_cast<double>(cand[k].d2))));
    }
    return lat;
  }
  throw Error(ErrorCode::InsufficientCells, "not enough nonempty cells near the target for a poised lattice");
}

/// Assembles the weighted least-squares problem of a lattice for data rho
/// (one value per member, plus the boundary average when present).
inline ReconstructionProblem assemble(const PoisedLattice& lat, const MonomialBasis& basis, const CutCellGrid& grid,
                                      const std::vector<CellQuadrature>& rules, const Eigen::VectorXd& rho,
                                      const BoundaryRule* boundary = nullptr) {
  ReconstructionProblem p;
  const Eigen::Index nrows = static_cast<Eigen::Index>(lat.members.size()) + (lat.has_boundary_row ? 1 : 0);
  if (rho.size() != nrows) throw Error(ErrorCode::InvalidArgument, "data size does not match lattice rows");
  if (lat.has_boundary_row && !boundary) throw Error(ErrorCode::InvalidArgument, "boundary rule required");
  p.A.resize(nrows, basis.size());
  p.w.resize(nrows);
  p.A.topRows(lat.members.size()) = lattice_rows(grid, rules, basis, lat.target, lat.members);
  for (std::size_t r = 0; r < lat.members.size(); ++r) p.w[r] = lat.weights[r];
  if (lat.has_boundary_row) {
    p.A.row(nrows - 1) = basis_averages(basis, *boundary, grid.unit_center(lat.target), grid.h()).transpose();
    p.w[nrows - 1] = lat.boundary_weight;
  }
  p.rho = rho;
  return p;
}

}  // namespace slfv
