#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "slfv/core/error.hpp"

namespace slfv {

/// Explicit Runge-Kutta tableau.
struct RKScheme {
  std::string name;
  int order{0};
  std::vector<double> c;
  std::vector<std::vector<double>> a;  ///< a[i] has i entries (strictly lower triangular)
  std::vector<double> b;

  int stages() const { return static_cast<int>(b.size()); }
};

namespace detail {

inline RKScheme classical_rk4() {
  return {"rk4", 4, {0.0, 0.5, 0.5, 1.0}, {{}, {0.5}, {0.0, 0.5}, {0.0, 0.0, 1.0}},
          {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0}};
}

// Verner's 8-stage sixth-order pair (sixth-order weights).
inline RKScheme verner6() {
  RKScheme s;
  s.name = "verner6";
  s.order = 6;
  s.c = {0.0, 1.0 / 6.0, 4.0 / 15.0, 2.0 / 3.0, 5.0 / 6.0, 1.0, 1.0 / 15.0, 1.0};
  s.a = {{},
         {1.0 / 6.0},
         {4.0 / 75.0, 16.0 / 75.0},
         {5.0 / 6.0, -8.0 / 3.0, 5.0 / 2.0},
         {-165.0 / 64.0, 55.0 / 6.0, -425.0 / 64.0, 85.0 / 96.0},
         {12.0 / 5.0, -8.0, 4015.0 / 612.0, -11.0 / 36.0, 88.0 / 255.0},
         {-8263.0 / 15000.0, 124.0 / 75.0, -643.0 / 680.0, -81.0 / 250.0, 2484.0 / 10625.0, 0.0},
         {3501.0 / 1720.0, -300.0 / 43.0, 297275.0 / 52632.0, -319.0 / 2322.0, 24068.0 / 84065.0, 0.0,
          3850.0 / 26703.0}};
  s.b = {3.0 / 40.0, 0.0, 875.0 / 2244.0, 23.0 / 72.0, 264.0 / 1955.0, 0.0, 125.0 / 11592.0, 43.0 / 616.0};
  return s;
}

// Prince-Dormand 13-stage eighth-order method (eighth-order weights).
inline RKScheme prince_dormand8() {
  RKScheme s;
  s.name = "dp8";
  s.order = 8;
  s.c = {0.0,
         1.0 / 18.0,
         1.0 / 12.0,
         1.0 / 8.0,
         5.0 / 16.0,
         3.0 / 8.0,
         59.0 / 400.0,
         93.0 / 200.0,
         5490023248.0 / 9719169821.0,
         13.0 / 20.0,
         1201146811.0 / 1299019798.0,
         1.0,
         1.0};
  s.a = {
      {},
      {1.0 / 18.0},
      {1.0 / 48.0, 1.0 / 16.0},
      {1.0 / 32.0, 0.0, 3.0 / 32.0},
      {5.0 / 16.0, 0.0, -75.0 / 64.0, 75.0 / 64.0},
      {3.0 / 80.0, 0.0, 0.0, 3.0 / 16.0, 3.0 / 20.0},
      {29443841.0 / 614563906.0, 0.0, 0.0, 77736538.0 / 692538347.0, -28693883.0 / 1125000000.0,
       23124283.0 / 1800000000.0},
      {16016141.0 / 946692911.0, 0.0, 0.0, 61564180.0 / 158732637.0, 22789713.0 / 633445777.0,
       545815736.0 / 2771057229.0, -180193667.0 / 1043307555.0},
      {39632708.0 / 573591083.0, 0.0, 0.0, -433636366.0 / 683701615.0, -421739975.0 / 2616292301.0,
       100302831.0 / 723423059.0, 790204164.0 / 839813087.0, 800635310.0 / 3783071287.0},
      {246121993.0 / 1340847787.0, 0.0, 0.0, -37695042795.0 / 15268766246.0, -309121744.0 / 1061227803.0,
       -12992083.0 / 490766935.0, 6005943493.0 / 2108947869.0, 393006217.0 / 1396673457.0,
       123872331.0 / 1001029789.0},
      {-1028468189.0 / 846180014.0, 0.0, 0.0, 8478235783.0 / 508512852.0, 1311729495.0 / 1432422823.0,
       -10304129995.0 / 1701304382.0, -48777925059.0 / 3047939560.0, 15336726248.0 / 1032824649.0,
       -45442868181.0 / 3398467696.0, 3065993473.0 / 597172653.0},
      {185892177.0 / 718116043.0, 0.0, 0.0, -3185094517.0 / 667107341.0, -477755414.0 / 1098053517.0,
       -703635378.0 / 230739211.0, 5731566787.0 / 1027545527.0, 5232866602.0 / 850066563.0,
       -4093664535.0 / 808688257.0, 3962137247.0 / 1805957418.0, 65686358.0 / 487910083.0},
      {403863854.0 / 491063109.0, 0.0, 0.0, -5068492393.0 / 434740067.0, -411421997.0 / 543043805.0,
       652783627.0 / 914296604.0, 11173962825.0 / 925320556.0, -13158990841.0 / 6184727034.0,
       3936647629.0 / 1978049680.0, -160528059.0 / 685178525.0, 248638103.0 / 1413531060.0, 0.0}};
  s.b = {14005451.0 / 335480064.0,
         0.0,
         0.0,
         0.0,
         0.0,
         -59238493.0 / 1068277825.0,
         181606767.0 / 758867731.0,
         561292985.0 / 797845732.0,
         -1041891430.0 / 1371343529.0,
         760417239.0 / 1151165299.0,
         118820643.0 / 751138087.0,
         -528747749.0 / 2220607170.0,
         1.0 / 4.0};
  return s;
}

// Rooted tree with its children given as indices into a tree table.
struct RootedTree {
  int order;
  double gamma;
  std::vector<int> children;
};

inline std::vector<RootedTree> rooted_trees(int max_order) {
  std::vector<RootedTree> trees{{1, 1.0, {}}};
  for (int n = 2; n <= max_order; ++n) {
    const std::size_t known = trees.size();
    std::vector<int> pick;
    // Multisets of existing trees (nondecreasing index) with orders summing to n - 1.
    auto rec = [&](auto&& self, std::size_t from, int budget) -> void {
      if (budget == 0) {
        double g = n;
        for (int c : pick) g *= trees[c].gamma;
        trees.push_back({n, g, pick});
        return;
      }
      for (std::size_t k = from; k < known; ++k) {
        if (trees[k].order > budget) continue;
        pick.push_back(static_cast<int>(k));
        self(self, k, budget - trees[k].order);
        pick.pop_back();
      }
    };
    rec(rec, 0, n - 1);
  }
  return trees;
}

}  // namespace detail

/// Largest defect |b . Phi(t) - 1/gamma(t)| over all rooted trees with up to
/// max_order nodes.
inline double order_condition_defect(const RKScheme& rk, int max_order) {
  const auto trees = detail::rooted_trees(max_order);
  const int s = rk.stages();
  std::vector<std::vector<double>> g(trees.size(), std::vector<double>(s, 1.0));
  double worst = 0.0;
  for (std::size_t t = 0; t < trees.size(); ++t) {
    for (int child : trees[t].children) {
      for (int i = 0; i < s; ++i) {
        double ag = 0.0;
        for (int j = 0; j < i; ++j) ag += rk.a[i][j] * g[child][j];
        g[t][i] *= ag;
      }
    }
    double phi = 0.0;
    for (int i = 0; i < s; ++i) phi += rk.b[i] * g[t][i];
    worst = std::max(worst, std::abs(phi - 1.0 / trees[t].gamma));
  }
  return worst;
}

/// Number of rooted trees of each order 1..max_order.
inline std::vector<int> rooted_tree_counts(int max_order) {
  std::vector<int> counts(max_order + 1, 0);
  for (const auto& t : detail::rooted_trees(max_order)) ++counts[t.order];
  return counts;
}

/// Tableau for solver order 4, 6 or 8, validated against its order
/// conditions on first use.
inline const RKScheme& rk_scheme(int order) {
  auto build = [](RKScheme s) {
    if (order_condition_defect(s, s.order) > 1e-12)
      throw Error(ErrorCode::UnsupportedOrder, "tableau " + s.name + " fails its order conditions");
    return s;
  };
  switch (order) {
    case 4: {
      static const RKScheme s = build(detail::classical_rk4());
      return s;
    }
    case 6: {
      static const RKScheme s = build(detail::verner6());
      return s;
    }
    case 8: {
      static const RKScheme s = build(detail::prince_dormand8());
      return s;
    }
    default: throw Error(ErrorCode::UnsupportedOrder, "order must be 4, 6 or 8");
  }
}

}  // namespace slfv
