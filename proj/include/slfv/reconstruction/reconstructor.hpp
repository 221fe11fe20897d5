#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "slfv/reconstruction/lattice.hpp"

namespace slfv {

/// Per-grid reconstruction cache: one lattice and one data-to-coefficient
/// operator per unit, built once for a static geometry. Pure units with a
/// full standard stencil share a single operator.
class Reconstructor {
 public:
  Reconstructor(const CutCellGrid& grid, const std::vector<CellQuadrature>& rules, int q, double cond_cap,
                bool boundary_rows, int m_boundary)
      : grid_(&grid), rules_(&rules), basis_(q) {
    const int U = grid.unit_count();
    lattices_.resize(U);
    op_index_.assign(U, -1);
    boundary_rules_.resize(U);
    const int n = basis_.size();
    for (int u = 0; u < U; ++u) {
      bool standard = false;
      if (grid.unit_is_pure(u)) {
        try {
          lattices_[u] = standard_stencil(grid, u, q);
          standard = true;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::TouchesBoundary) throw;
        }
      }
      if (standard) {
        standard_units_.push_back(u);
        continue;
      }
      const BoundaryRule* br = nullptr;
      if (boundary_rows && grid.unit_has_interface(u)) {
        const auto arcs = unit_cut_boundary(grid, u);
        if (!arcs.empty()) {
          boundary_rules_[u] = std::make_unique<BoundaryRule>(boundary_rule(arcs, m_boundary));
          br = boundary_rules_[u].get();
        }
      }
      lattices_[u] = boundary_stencil(grid, rules, basis_, u, cond_cap, br);
      const Eigen::Index rows = static_cast<Eigen::Index>(lattices_[u].members.size()) + (br ? 1 : 0);
      Eigen::VectorXd zero = Eigen::VectorXd::Zero(rows);
      const auto prob = assemble(lattices_[u], basis_, grid, rules, zero, br);
      op_index_[u] = static_cast<int>(ops_.size());
      auto op = build_operator(prob.A, prob.w);
      lattices_[u].condition = op.condition;
      ops_.push_back(std::move(op));
      systems_.push_back(prob);
    }
    if (!standard_units_.empty()) {
      const auto& tmpl = standard_template(q);
      standard_P_ = tmpl.P;
      standard_members_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(standard_units_.size()));
      for (std::size_t k = 0; k < standard_units_.size(); ++k)
        for (int r = 0; r < n; ++r) standard_members_(r, k) = lattices_[standard_units_[k]].members[r];
    }
  }

  const MonomialBasis& basis() const { return basis_; }
  const CutCellGrid& grid() const { return *grid_; }
  const PoisedLattice& lattice(int u) const { return lattices_[u]; }
  bool is_standard(int u) const { return op_index_[u] < 0; }
  const BoundaryRule* boundary_rule_of(int u) const { return boundary_rules_[u].get(); }
  int standard_count() const { return static_cast<int>(standard_units_.size()); }

  /// Coefficients of every unit, column u of the returned N x U matrix.
  /// bvals[u] is the cut-boundary average used by units with a boundary row.
  /// Data enter relative to the unit's own average, so constants give zero
  /// higher coefficients exactly.
  void compute(const std::vector<double>& rho, const std::vector<double>& bvals, Eigen::MatrixXd& coeffs) const {
    const int n = basis_.size();
    const int U = grid_->unit_count();
    coeffs.resize(n, U);
    if (!standard_units_.empty()) {
      const Eigen::Index S = static_cast<Eigen::Index>(standard_units_.size());
      Eigen::MatrixXd gathered(n, S);
      for (Eigen::Index k = 0; k < S; ++k) {
        const double base = rho[standard_units_[k]];
        for (int r = 0; r < n; ++r) gathered(r, k) = rho[standard_members_(r, k)] - base;
      }
      const Eigen::MatrixXd c = standard_P_ * gathered;
      for (Eigen::Index k = 0; k < S; ++k) {
        coeffs.col(standard_units_[k]) = c.col(k);
        coeffs(0, standard_units_[k]) += rho[standard_units_[k]];
      }
    }
    for (int u = 0; u < U; ++u) {
      if (op_index_[u] < 0) continue;
      const auto& lat = lattices_[u];
      const auto& P = ops_[op_index_[u]].P;
      Eigen::VectorXd v(P.cols());
      for (std::size_t r = 0; r < lat.members.size(); ++r) v[r] = rho[lat.members[r]] - rho[u];
      if (lat.has_boundary_row) v[v.size() - 1] = bvals[u] - rho[u];
      coeffs.col(u) = P * v;
      coeffs(0, u) += rho[u];
    }
  }

  /// Value at p of the polynomial of unit u.
  double evaluate(const Eigen::MatrixXd& coeffs, int u, const Point2& p) const {
    const Point2 c = grid_->unit_center(u);
    const double h = grid_->h();
    return basis_.eval(coeffs.col(u).data(), (p.x - c.x) / h, (p.y - c.y) / h);
  }

  /// Weighted residual norm of the fit of unit u relative to its data.
  double residual(const std::vector<double>& rho, const std::vector<double>& bvals, const Eigen::MatrixXd& coeffs,
                  int u) const {
    const auto& lat = lattices_[u];
    Eigen::MatrixXd A;
    Eigen::VectorXd w;
    if (op_index_[u] < 0) {
      A = lattice_rows(*grid_, *rules_, basis_, u, lat.members);
      w = Eigen::Map<const Eigen::VectorXd>(lat.weights.data(), static_cast<Eigen::Index>(lat.weights.size()));
    } else {
      A = systems_[op_index_[u]].A;
      w = systems_[op_index_[u]].w;
    }
    Eigen::VectorXd v(A.rows());
    for (std::size_t r = 0; r < lat.members.size(); ++r) v[r] = rho[lat.members[r]];
    if (lat.has_boundary_row) v[v.size() - 1] = bvals[u];
    const Eigen::VectorXd res = w.cwiseSqrt().cwiseProduct(A * coeffs.col(u) - v);
    const double scale = w.cwiseSqrt().cwiseProduct(v).norm();
    return scale > 0.0 ? res.norm() / scale : res.norm();
  }

 private:
  const CutCellGrid* grid_;
  const std::vector<CellQuadrature>* rules_;
  MonomialBasis basis_;
  std::vector<PoisedLattice> lattices_;
  std::vector<int> op_index_;
  std::vector<ReconstructionOperator> ops_;
  std::vector<ReconstructionProblem> systems_;
  std::vector<std::unique_ptr<BoundaryRule>> boundary_rules_;
  std::vector<int> standard_units_;
  Eigen::MatrixXd standard_P_;
  Eigen::MatrixXi standard_members_;
};

}  // namespace slfv
