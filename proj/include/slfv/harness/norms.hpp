#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "slfv/core/error.hpp"

namespace slfv {

struct ErrorNorms {
  double l1{0.0};
  double l2{0.0};
  double linf{0.0};
};

/// Volume-weighted L1 and L2 norms and the max norm of per-cell values.
inline ErrorNorms norms(const std::vector<double>& g, const std::vector<double>& volume) {
  if (g.size() != volume.size()) throw Error(ErrorCode::InvalidArgument, "norms: size mismatch");
  ErrorNorms n;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double a = std::abs(g[i]);
    n.l1 += volume[i] * a;
    n.l2 += volume[i] * a * a;
    n.linf = std::max(n.linf, a);
  }
  n.l2 = std::sqrt(n.l2);
  return n;
}

/// Cauchy-Schwarz ordering over a measure of total mass `area`:
/// L1 <= sqrt(area) L2 and L2 <= sqrt(area) Linf.
inline bool norms_ordered(const ErrorNorms& n, double area, double rel_slack = 1e-12) {
  const double s = std::sqrt(area);
  return n.l1 <= s * n.l2 * (1.0 + rel_slack) && n.l2 <= s * n.linf * (1.0 + rel_slack);
}

/// Convergence rate log_r(coarse / fine).
inline double convergence_rate(double coarse, double fine, double r) {
  if (!(coarse > 0.0) || !(fine > 0.0)) return std::nan("");
  return std::log(coarse / fine) / std::log(r);
}

}  // namespace slfv
