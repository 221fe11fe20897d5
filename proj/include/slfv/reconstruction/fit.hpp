#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "slfv/core/error.hpp"
#include "slfv/quadrature/cell_rule.hpp"
#include "slfv/reconstruction/basis.hpp"

namespace slfv {

/// Averages of every basis function (centered at `center`, scaled by h)
/// under an averaging rule.
template <class Rule>
Eigen::VectorXd basis_averages(const MonomialBasis& basis, const Rule& rule, const Point2& center, double h) {
  const int n = basis.size();
  Eigen::VectorXd avg = Eigen::VectorXd::Zero(n);
  std::array<double, MonomialBasis::dimension(kMaxDegree)> vals{};
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    basis.eval((rule.nodes[k].x - center.x) / h, (rule.nodes[k].y - center.y) / h, vals.data());
    for (int i = 0; i < n; ++i) avg[i] += rule.weights[k] * vals[i];
  }
  return avg;
}

/// Weighted least-squares problem: rows of A hold the basis averages over
/// each lattice member (and optionally the cut boundary), w the row weights.
struct ReconstructionProblem {
  Eigen::MatrixXd A;
  Eigen::VectorXd w;
  Eigen::VectorXd rho;
};

/// Linear map from data to coefficients, alpha = P rho, minimizing
/// sum_j w_j (A_j alpha - rho_j)^2.
struct ReconstructionOperator {
  Eigen::MatrixXd P;
  double condition{0.0};
};

/// Condition number of sqrt(W) A after column equilibration.
inline double weighted_condition(const Eigen::MatrixXd& A, const Eigen::VectorXd& w) {
  Eigen::MatrixXd B = w.cwiseSqrt().asDiagonal() * A;
  for (Eigen::Index j = 0; j < B.cols(); ++j) {
    const double n = B.col(j).norm();
    if (n > 0.0) B.col(j) /= n;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[s.size() - 1] <= 0.0) return std::numeric_limits<double>::infinity();
  return s[0] / s[s.size() - 1];
}

/// Householder QR of the equilibrated weighted matrix.
inline ReconstructionOperator build_operator(const Eigen::MatrixXd& A, const Eigen::VectorXd& w) {
  const Eigen::Index rows = A.rows(), cols = A.cols();
  if (rows < cols) throw Error(ErrorCode::RankDeficient, "fewer lattice rows than basis functions");
  const Eigen::VectorXd sw = w.cwiseSqrt();
  Eigen::MatrixXd B = sw.asDiagonal() * A;
  Eigen::VectorXd d(cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double n = B.col(j).norm();
    d[j] = n > 0.0 ? 1.0 / n : 1.0;
    B.col(j) *= d[j];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B);
  qr.setThreshold(1e-13);
  if (qr.rank() < cols) throw Error(ErrorCode::RankDeficient, "lattice does not determine the polynomial");
  ReconstructionOperator op;
  const Eigen::MatrixXd pinv = qr.solve(Eigen::MatrixXd::Identity(rows, rows));
  op.P = d.asDiagonal() * pinv * sw.asDiagonal();
  op.condition = weighted_condition(A, w);
  return op;
}

/// Solves the problem directly; returns the coefficients.
inline Eigen::VectorXd fit(const ReconstructionProblem& prob) {
  if (prob.rho.size() != prob.A.rows()) throw Error(ErrorCode::InvalidArgument, "data size does not match lattice");
  return build_operator(prob.A, prob.w).P * prob.rho;
}

}  // namespace slfv
