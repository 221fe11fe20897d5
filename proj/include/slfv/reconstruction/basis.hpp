#pragma once

#include <array>
#include <utility>
#include <vector>

#include "slfv/core/error.hpp"
#include "slfv/core/point.hpp"

namespace slfv {

inline constexpr int kMaxDegree = 8;

/// Monomials x^a y^b with a + b <= q, ordered by total degree and then by
/// decreasing power of x. Evaluated in cell-local coordinates
/// ((x - xc) / h, (y - yc) / h).
class MonomialBasis {
 public:
  explicit MonomialBasis(int q) : q_(q) {
    if (q < 0 || q > kMaxDegree) throw Error(ErrorCode::InvalidArgument, "basis degree must lie in [0, 8]");
    for (int d = 0; d <= q; ++d)
      for (int a = d; a >= 0; --a) exps_.push_back({a, d - a});
  }

  int degree() const { return q_; }
  int size() const { return static_cast<int>(exps_.size()); }
  static constexpr int dimension(int q) { return (q + 1) * (q + 2) / 2; }
  const std::vector<std::pair<int, int>>& exponents() const { return exps_; }

  /// Values of all basis functions at local coordinates (x, y).
  void eval(double x, double y, double* out) const {
    std::array<double, kMaxDegree + 1> px, py;
    px[0] = py[0] = 1.0;
    for (int k = 1; k <= q_; ++k) {
      px[k] = px[k - 1] * x;
      py[k] = py[k - 1] * y;
    }
    for (std::size_t k = 0; k < exps_.size(); ++k) out[k] = px[exps_[k].first] * py[exps_[k].second];
  }

  /// sum_k alpha_k psi_k(x, y).
  double eval(const double* alpha, double x, double y) const {
    std::array<double, kMaxDegree + 1> py;
    py[0] = 1.0;
    for (int k = 1; k <= q_; ++k) py[k] = py[k - 1] * y;
    double s = 0.0;
    std::array<double, kMaxDegree + 1> xs;
    xs[0] = 1.0;
    for (int k = 1; k <= q_; ++k) xs[k] = xs[k - 1] * x;
    for (std::size_t k = 0; k < exps_.size(); ++k) s += alpha[k] * xs[exps_[k].first] * py[exps_[k].second];
    return s;
  }

 private:
  int q_;
  std::vector<std::pair<int, int>> exps_;
};

/// Local polynomial f(x) = sum_k alpha_k psi_k((x - center) / h).
struct LocalPolynomial {
  std::vector<double> alpha;
  Point2 center;
  double h{1.0};

  double operator()(const MonomialBasis& basis, const Point2& p) const {
    return basis.eval(alpha.data(), (p.x - center.x) / h, (p.y - center.y) / h);
  }
};

inline double evaluate(const LocalPolynomial& f, const MonomialBasis& basis, const Point2& p) { return f(basis, p); }

}  // namespace slfv
