#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace slfv::poly {

/// Coefficients in increasing powers: c[0] + c[1] t + ... .
using Coeffs = std::vector<double>;

inline double eval(const Coeffs& c, double t) {
  double r = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * t + *it;
  return r;
}

inline Coeffs derivative(const Coeffs& c) {
  if (c.size() <= 1) return {0.0};
  Coeffs d(c.size() - 1);
  for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = static_cast<double>(i) * c[i];
  return d;
}

inline Coeffs multiply(const Coeffs& a, const Coeffs& b) {
  Coeffs r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

inline Coeffs add(const Coeffs& a, const Coeffs& b) {
  Coeffs r(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return r;
}

/// Drops trailing coefficients that are negligible relative to the largest.
inline Coeffs trimmed(Coeffs c, double rel = 1e-14) {
  double m = 0.0;
  for (double v : c) m = std::max(m, std::abs(v));
  while (c.size() > 1 && std::abs(c.back()) <= rel * m) c.pop_back();
  return c;
}

struct Root {
  double t;
  bool tangent;  ///< root without a sign change (double root)
};

namespace detail {

// Root of a function monotone on [a, b] with fa * fb <= 0.
inline double bracketed_root(const Coeffs& c, const Coeffs& dc, double a, double b, double fa) {
  double t = 0.5 * (a + b);
  for (int it = 0; it < 200; ++it) {
    const double f = eval(c, t);
    if (f == 0.0) return t;
    if ((f < 0) == (fa < 0)) {
      a = t;
      fa = f;
    } else {
      b = t;
    }
    const double d = eval(dc, t);
    double tn = (d != 0.0) ? t - f / d : 0.5 * (a + b);
    if (!(tn > a && tn < b)) tn = 0.5 * (a + b);
    if (std::abs(tn - t) <= 1e-16 * std::max(1.0, std::abs(t)) || b - a <= 4e-16 * std::max(1.0, std::abs(t)))
      return tn;
    t = tn;
  }
  return t;
}

inline void roots_rec(const Coeffs& c, double a, double b, double ftol, std::vector<Root>& out) {
  if (c.size() <= 1) return;
  if (c.size() == 2) {
    if (c[1] == 0.0) return;
    const double t = -c[0] / c[1];
    if (t >= a && t <= b) out.push_back({t, false});
    return;
  }
  const Coeffs dc = derivative(c);
  std::vector<Root> crit;
  roots_rec(dc, a, b, ftol, crit);
  std::vector<double> knots{a};
  for (const auto& r : crit)
    if (r.t > a && r.t < b) knots.push_back(r.t);
  knots.push_back(b);
  std::sort(knots.begin(), knots.end());
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double l = knots[i], r = knots[i + 1];
    const double fl = eval(c, l), fr = eval(c, r);
    if (fl == 0.0) {
      out.push_back({l, false});
      continue;
    }
    if (i + 2 == knots.size() && fr == 0.0) {
      out.push_back({r, false});
      continue;
    }
    if ((fl < 0) != (fr < 0) && fr != 0.0) out.push_back({bracketed_root(c, dc, l, r, fl), false});
  }
  // Tangential contacts at interior extrema.
  for (std::size_t i = 1; i + 1 < knots.size(); ++i) {
    const double t = knots[i];
    const double f = eval(c, t);
    if (f != 0.0 && std::abs(f) <= ftol) {
      const double fl = eval(c, knots[i - 1]), fr = eval(c, knots[i + 1]);
      if ((fl < 0) == (f < 0) && (fr < 0) == (f < 0)) out.push_back({t, true});
    }
  }
}

}  // namespace detail

/// Real roots of c on [a, b], sorted and deduplicated. Near-double roots whose
/// value falls below ftol are reported with the tangent flag.
inline std::vector<Root> real_roots(const Coeffs& coeffs, double a, double b, double ftol = 0.0) {
  const Coeffs c = trimmed(coeffs);
  std::vector<Root> out;
  if (c.size() == 1) return out;
  detail::roots_rec(c, a, b, ftol, out);
  std::sort(out.begin(), out.end(), [](const Root& l, const Root& r) { return l.t < r.t; });
  std::vector<Root> uniq;
  for (const auto& r : out) {
    if (!uniq.empty() && std::abs(r.t - uniq.back().t) <= 1e-13 * std::max(1.0, std::abs(r.t))) {
      uniq.back().tangent = uniq.back().tangent && r.tangent;
      continue;
    }
    uniq.push_back(r);
  }
  return uniq;
}

}  // namespace slfv::poly
