#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "slfv/core/error.hpp"

namespace slfv {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;

  int size() const { return static_cast<int>(nodes.size()); }
};

namespace detail {

inline GaussRule1D compute_gauss_legendre(int m) {
  GaussRule1D r;
  r.nodes.resize(m);
  r.weights.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= m; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = m * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[m - 1 - i] = x;
    r.weights[i] = w;
    r.weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) r.nodes[m / 2] = 0.0;
  return r;
}

}  // namespace detail

inline constexpr int kMaxGaussPoints = 32;

/// Cached m-point Gauss-Legendre rule, 1 <= m <= 32.
inline const GaussRule1D& gauss_legendre(int m) {
  if (m < 1 || m > kMaxGaussPoints) throw Error(ErrorCode::InvalidArgument, "Gauss rule size must be in [1, 32]");
  static const std::array<GaussRule1D, kMaxGaussPoints + 1> table = [] {
    std::array<GaussRule1D, kMaxGaussPoints + 1> t;
    for (int k = 1; k <= kMaxGaussPoints; ++k) t[k] = detail::compute_gauss_legendre(k);
    return t;
  }();
  return table[m];
}

}  // namespace slfv
