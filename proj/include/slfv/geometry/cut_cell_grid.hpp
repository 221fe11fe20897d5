#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <tuple>
#include <vector>

#include "slfv/core/error.hpp"
#include "slfv/geometry/domain.hpp"

namespace slfv {

/// Uniform Cartesian grid over [origin, origin + (nx, ny) h].
struct GridSpec {
  Point2 origin;
  double h{1.0};
  int nx{0};
  int ny{0};

  int count() const { return nx * ny; }
  int index(int i, int j) const { return j * nx + i; }
  int col(int idx) const { return idx % nx; }
  int row(int idx) const { return idx / nx; }
  Point2 lo(int i, int j) const { return {origin.x + i * h, origin.y + j * h}; }
  Point2 center(int i, int j) const { return {origin.x + (i + 0.5) * h, origin.y + (j + 0.5) * h}; }
  Point2 center(int idx) const { return center(col(idx), row(idx)); }
  Point2 hi() const { return {origin.x + nx * h, origin.y + ny * h}; }
  bool in_range(int i, int j) const { return i >= 0 && j >= 0 && i < nx && j < ny; }

  /// Cell containing p, or nullopt outside the grid.
  std::optional<int> locate(const Point2& p) const {
    const int i = static_cast<int>(std::floor((p.x - origin.x) / h));
    const int j = static_cast<int>(std::floor((p.y - origin.y) / h));
    if (!in_range(i, j)) return std::nullopt;
    return index(i, j);
  }

  bool same_layout(const GridSpec& o) const { return origin == o.origin && h == o.h && nx == o.nx && ny == o.ny; }
};

/// Grid of spacing h covering the domain's bounding box. The origin is the
/// box's lower-left corner moved by -offset * h.
inline GridSpec grid_for_domain(const SplinegonDomain& dom, double h, const Vec2& offset = {}) {
  const auto& b = dom.bbox();
  GridSpec g;
  g.origin = b.lo - h * offset;
  g.h = h;
  g.nx = std::max(1, static_cast<int>(std::ceil((b.hi.x - g.origin.x) / h - 1e-9)));
  g.ny = std::max(1, static_cast<int>(std::ceil((b.hi.y - g.origin.y) / h - 1e-9)));
  return g;
}

enum class CellClass : unsigned char { Empty, Pure, Interface };

/// One edge of a cut-cell boundary loop.
struct LoopEdge {
  CubicSegment seg;
  bool on_boundary{false};  ///< part of the domain boundary (cut boundary)
};

struct CutCell {
  CellClass cls{CellClass::Empty};
  double volume{0.0};
  double cut_length{0.0};
  std::vector<LoopEdge> loop;  ///< counterclockwise; interface cells only
};

/// Cartesian grid cut against a splinegon domain, with an optional merge map
/// that groups small cells into units. A unit is addressed by its host cell.
class CutCellGrid {
 public:
  CutCellGrid() = default;
  CutCellGrid(GridSpec spec, std::vector<CutCell> cells, bool periodic = false)
      : spec_(spec), cells_(std::move(cells)), periodic_(periodic) {
    host_.resize(cells_.size());
    for (std::size_t c = 0; c < cells_.size(); ++c)
      host_[c] = cells_[c].cls == CellClass::Empty ? -1 : static_cast<int>(c);
    rebuild_units();
  }

  const GridSpec& spec() const { return spec_; }
  double h() const { return spec_.h; }
  bool periodic() const { return periodic_; }
  const std::vector<CutCell>& cells() const { return cells_; }
  const CutCell& cell(int idx) const { return cells_[idx]; }

  /// Host cell of a cell (itself when unmerged), -1 for empty cells.
  int host(int idx) const { return host_[idx]; }
  const std::vector<int>& merge_map() const { return host_; }

  int unit_count() const { return static_cast<int>(unit_hosts_.size()); }
  int unit_host(int u) const { return unit_hosts_[u]; }
  int unit_of_cell(int idx) const { return host_[idx] < 0 ? -1 : unit_id_[host_[idx]]; }
  const std::vector<int>& unit_members(int u) const { return unit_members_[u]; }
  double unit_volume(int u) const { return unit_volume_[u]; }
  double unit_cut_length(int u) const { return unit_cut_length_[u]; }
  Point2 unit_center(int u) const { return spec_.center(unit_hosts_[u]); }
  bool unit_is_pure(int u) const {
    return unit_members_[u].size() == 1 && cells_[unit_members_[u][0]].cls == CellClass::Pure;
  }
  bool unit_has_interface(int u) const {
    for (int c : unit_members_[u])
      if (cells_[c].cls == CellClass::Interface) return true;
    return false;
  }
  bool unit_is_merged(int u) const { return unit_members_[u].size() > 1; }

  double total_volume() const { return std::accumulate(unit_volume_.begin(), unit_volume_.end(), 0.0); }

  void set_host(int idx, int host) { host_[idx] = host; }
  void rebuild_units() {
    unit_hosts_.clear();
    unit_id_.assign(cells_.size(), -1);
    for (std::size_t c = 0; c < cells_.size(); ++c)
      if (host_[c] == static_cast<int>(c)) {
        unit_id_[c] = static_cast<int>(unit_hosts_.size());
        unit_hosts_.push_back(static_cast<int>(c));
      }
    unit_members_.assign(unit_hosts_.size(), {});
    unit_volume_.assign(unit_hosts_.size(), 0.0);
    unit_cut_length_.assign(unit_hosts_.size(), 0.0);
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      if (host_[c] < 0) continue;
      const int u = unit_id_[host_[c]];
      unit_members_[u].push_back(static_cast<int>(c));
      unit_volume_[u] += cells_[c].volume;
      unit_cut_length_[u] += cells_[c].cut_length;
    }
  }

 private:
  GridSpec spec_;
  std::vector<CutCell> cells_;
  bool periodic_{false};
  std::vector<int> host_;
  std::vector<int> unit_hosts_;
  std::vector<int> unit_id_;
  std::vector<std::vector<int>> unit_members_;
  std::vector<double> unit_volume_;
  std::vector<double> unit_cut_length_;
};

/// All-pure grid (rectangular or periodic box without embedded boundary).
inline CutCellGrid box_grid(const GridSpec& spec, bool periodic) {
  std::vector<CutCell> cells(spec.count());
  for (auto& c : cells) {
    c.cls = CellClass::Pure;
    c.volume = spec.h * spec.h;
  }
  return CutCellGrid(spec, std::move(cells), periodic);
}

namespace detail {

struct Piece {
  CubicSegment seg;
  int cell;
};

struct Arc {
  std::vector<CubicSegment> segs;
  double s_start{0}, s_end{0};
  bool used{false};
};

inline double snap(double v, double origin, double h, double tol) {
  const double k = std::round((v - origin) / h);
  const double g = origin + k * h;
  return std::abs(v - g) <= tol ? g : v;
}

// Crossings of one segment with the grid lines, sorted, including 0 and 1.
inline std::vector<double> grid_splits(const CubicSegment& s, const BoundingBox& b, const GridSpec& g) {
  std::vector<double> ls{0.0, 1.0};
  auto add_roots = [&](const std::array<double, 4>& c, double origin, double lo, double hi) {
    const int k0 = static_cast<int>(std::ceil((lo - origin) / g.h - 1e-12));
    const int k1 = static_cast<int>(std::floor((hi - origin) / g.h + 1e-12));
    for (int k = k0; k <= k1; ++k) {
      poly::Coeffs f(c.begin(), c.end());
      f[0] -= origin + k * g.h;
      for (const auto& r : poly::real_roots(f, 0.0, 1.0)) ls.push_back(r.t);
    }
  };
  add_roots(s.cx, g.origin.x, b.lo.x, b.hi.x);
  add_roots(s.cy, g.origin.y, b.lo.y, b.hi.y);
  std::sort(ls.begin(), ls.end());
  std::vector<double> out{0.0};
  for (double l : ls) {
    if (l <= 1e-12 || l >= 1.0 - 1e-12) continue;
    if (l - out.back() > 1e-12) out.push_back(l);
  }
  out.push_back(1.0);
  return out;
}

// Position of a point on the cell perimeter: bottom [0,h), right [h,2h),
// top [2h,3h), left [3h,4h), counterclockwise from the lower-left corner.
inline double perimeter_position(const Point2& p, const Point2& lo, double h, double tol) {
  const double x1 = lo.x + h, y1 = lo.y + h;
  if (std::abs(p.y - lo.y) <= tol) return std::clamp(p.x - lo.x, 0.0, h);
  if (std::abs(p.x - x1) <= tol) return h + std::clamp(p.y - lo.y, 0.0, h);
  if (std::abs(p.y - y1) <= tol) return 2.0 * h + std::clamp(x1 - p.x, 0.0, h);
  if (std::abs(p.x - lo.x) <= tol) return 3.0 * h + std::clamp(y1 - p.y, 0.0, h);
  return -1.0;
}

inline Point2 corner(const Point2& lo, double h, int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return lo;
    case 1: return {lo.x + h, lo.y};
    case 2: return {lo.x + h, lo.y + h};
    default: return {lo.x, lo.y + h};
  }
}

inline bool on_cell_edge(const CubicSegment& s, const Point2& lo, double h, double tol) {
  if (!s.is_line(1e-12)) return false;
  for (double l : {0.0, 0.5, 1.0})
    if (perimeter_position(s.eval(l), lo, h, tol) < 0.0) return false;
  const Point2 a = s.start(), b = s.end();
  return std::abs(a.x - b.x) <= tol || std::abs(a.y - b.y) <= tol;
}

}  // namespace detail

/// Classifies every grid cell against the domain and builds the boundary
/// loop of each interface cell.
inline CutCellGrid classify_cells(const SplinegonDomain& dom, const GridSpec& g) {
  if (!(g.h > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid size must be positive");
  const double h = g.h;
  const double tol = 1e-9 * h;
  {
    const auto& b = dom.bbox();
    const Point2 ghi = g.hi();
    if (b.lo.x < g.origin.x - tol || b.lo.y < g.origin.y - tol || b.hi.x > ghi.x + tol || b.hi.y > ghi.y + tol)
      throw Error(ErrorCode::InvalidArgument, "grid box does not cover the domain");
  }
  std::vector<CutCell> cells(g.count());
  std::vector<std::vector<detail::Arc>> arcs(g.count());

  for (std::size_t ci = 0; ci < dom.curves().size(); ++ci) {
    const auto& curve = dom.curves()[ci];
    std::vector<detail::Piece> pieces;
    for (int si = 0; si < curve.size(); ++si) {
      const auto& seg = curve.segments[si];
      const auto ls = detail::grid_splits(seg, curve.segment_boxes[si], g);
      auto snapped = [&](const Point2& p) {
        return Point2{detail::snap(p.x, g.origin.x, h, tol), detail::snap(p.y, g.origin.y, h, tol)};
      };
      std::vector<Point2> pts(ls.size());
      for (std::size_t k = 0; k < ls.size(); ++k) pts[k] = snapped(seg.eval(ls[k]));
      pts.front() = snapped(seg.start());
      pts.back() = snapped(curve.segments[(si + 1) % curve.size()].start());
      for (std::size_t k = 0; k + 1 < ls.size(); ++k) {
        if (distance(pts[k], pts[k + 1]) <= 1e-13 * h) continue;
        const CubicSegment piece = seg.sub(ls[k], ls[k + 1]).with_endpoints(pts[k], pts[k + 1]);
        Point2 mid = piece.eval(0.5);
        const Vec2 d = piece.deriv(0.5);
        const double dn = norm(d);
        const double fx = (mid.x - g.origin.x) / h, fy = (mid.y - g.origin.y) / h;
        if (dn > 0.0 && (std::abs(fx - std::round(fx)) < 1e-7 || std::abs(fy - std::round(fy)) < 1e-7))
          mid += (1e-6 * h / dn) * Vec2{-d.y, d.x};
        const auto cell = g.locate(mid);
        if (!cell) throw Error(ErrorCode::InvalidArgument, "boundary leaves the grid box");
        pieces.push_back({piece, *cell});
      }
    }
    if (pieces.empty()) throw Error(ErrorCode::InvalidDomain, "degenerate boundary curve");
    // Chain consecutive pieces in the same cell into arcs.
    std::vector<std::pair<int, std::vector<CubicSegment>>> chains;
    for (const auto& p : pieces) {
      if (chains.empty() || chains.back().first != p.cell) chains.push_back({p.cell, {}});
      chains.back().second.push_back(p.seg);
    }
    if (chains.size() == 1) {
      if (ci > 0) throw Error(ErrorCode::HoleInsideCell, "a hole lies entirely inside one grid cell");
      throw Error(ErrorCode::InvalidDomain, "domain lies entirely inside one grid cell");
    }
    if (chains.front().first == chains.back().first) {
      auto& last = chains.back().second;
      last.insert(last.end(), chains.front().second.begin(), chains.front().second.end());
      chains.erase(chains.begin());
    }
    for (auto& [cell, segs] : chains) {
      detail::Arc arc;
      const Point2 lo = g.lo(g.col(cell), g.row(cell));
      arc.s_start = detail::perimeter_position(segs.front().start(), lo, h, tol);
      arc.s_end = detail::perimeter_position(segs.back().end(), lo, h, tol);
      if (arc.s_start < 0.0 || arc.s_end < 0.0)
        throw Error(ErrorCode::DegenerateTangency, "boundary arc does not end on the cell boundary");
      arc.segs = std::move(segs);
      arcs[cell].push_back(std::move(arc));
    }
  }

  for (int idx = 0; idx < g.count(); ++idx) {
    auto& cell = cells[idx];
    auto& cell_arcs = arcs[idx];
    const Point2 lo = g.lo(g.col(idx), g.row(idx));
    if (cell_arcs.empty()) {
      const bool inside = dom.contains(g.center(idx));
      cell.cls = inside ? CellClass::Pure : CellClass::Empty;
      cell.volume = inside ? h * h : 0.0;
      continue;
    }
    // Walk the loop: each arc is followed by the counterclockwise stretch of
    // the cell perimeter up to the start of the nearest next arc.
    const double per = 4.0 * h;
    std::vector<LoopEdge> loop;
    std::size_t cur = 0;
    std::size_t guard = 0;
    do {
      auto& a = cell_arcs[cur];
      a.used = true;
      for (const auto& s : a.segs) loop.push_back({s, true});
      std::size_t best = cur;
      double best_gap = per * 2;
      for (std::size_t k = 0; k < cell_arcs.size(); ++k) {
        if (cell_arcs[k].used && k != 0) continue;
        double gap = cell_arcs[k].s_start - a.s_end;
        if (gap < -tol) gap += per;
        gap = std::max(gap, 0.0);
        if (gap < best_gap) {
          best_gap = gap;
          best = k;
        }
      }
      const Point2 from = a.segs.back().end();
      const Point2 to = cell_arcs[best].segs.front().start();
      std::vector<Point2> path{from};
      const double s0 = a.s_end, s1 = a.s_end + best_gap;
      for (int k = static_cast<int>(std::floor(s0 / h + 1e-12)) + 1; k * h < s1 - tol; ++k)
        path.push_back(detail::corner(lo, h, k));
      path.push_back(to);
      for (std::size_t k = 0; k + 1 < path.size(); ++k)
        if (distance(path[k], path[k + 1]) > 1e-13 * h)
          loop.push_back({CubicSegment::line(path[k], path[k + 1]), false});
      cur = best;
      if (++guard > cell_arcs.size() + 1) throw Error(ErrorCode::MultipleCutLoops, "cell loop does not close");
    } while (cur != 0);
    for (const auto& a : cell_arcs)
      if (!a.used) throw Error(ErrorCode::MultipleCutLoops, "cell contains disjoint cut loops");

    std::vector<CubicSegment> segs;
    for (const auto& e : loop) segs.push_back(e.seg);
    const double vol = signed_area(segs);
    bool aligned = true;
    for (const auto& e : loop)
      if (e.on_boundary && !detail::on_cell_edge(e.seg, lo, h, tol)) aligned = false;
    if (aligned && std::abs(vol - h * h) <= 1e-10 * h * h) {
      cell.cls = CellClass::Pure;
      cell.volume = h * h;
      continue;
    }
    if (vol <= 0.0) throw Error(ErrorCode::InvalidDomain, "cut cell with nonpositive area");
    cell.cls = CellClass::Interface;
    cell.volume = vol;
    cell.cut_length = 0.0;
    for (const auto& e : loop)
      if (e.on_boundary) cell.cut_length += e.seg.length();
    cell.loop = std::move(loop);
  }
  return CutCellGrid(g, std::move(cells));
}

/// Merges cells whose volume fraction is below eps, or interface cells whose
/// cut-boundary length is below eps h, into an edge-adjacent neighbor.
inline CutCellGrid merge_small_cells(CutCellGrid grid, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::InvalidArgument, "merge threshold must lie in (0, 1)");
  const GridSpec& g = grid.spec();
  const double h = g.h;
  const int n = g.count();
  std::vector<int> parent(n);
  std::vector<double> vol(n, 0.0), len(n, 0.0);
  std::vector<char> iface(n, 0);
  std::vector<int> members(n, 1);
  for (int c = 0; c < n; ++c) {
    parent[c] = grid.host(c);
    vol[c] = grid.cell(c).volume;
    len[c] = grid.cell(c).cut_length;
    iface[c] = grid.cell(c).cls == CellClass::Interface;
  }
  auto find = [&](int c) {
    while (parent[c] != c) c = parent[c] = parent[parent[c]];
    return c;
  };
  auto neighbors = [&](int c) {
    std::vector<int> out;
    const int i = g.col(c), j = g.row(c);
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      int a = i + di[k], b = j + dj[k];
      if (grid.periodic()) {
        a = (a + g.nx) % g.nx;
        b = (b + g.ny) % g.ny;
      }
      if (g.in_range(a, b) && grid.host(g.index(a, b)) >= 0) out.push_back(g.index(a, b));
    }
    return out;
  };
  std::vector<int> order;
  for (int c = 0; c < n; ++c)
    if (parent[c] >= 0) order.push_back(c);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vol[a] < vol[b]; });

  for (int pass = 0; pass < 8; ++pass) {
    bool changed = false;
    for (int c0 : order) {
      const int c = find(c0);
      if (c != c0) continue;
      const bool small_vol = vol[c] < eps * h * h;
      const bool short_cut = iface[c] && len[c] < eps * h;
      if (!small_vol && !short_cut) continue;
      // Candidate hosts: units edge-adjacent to any member of this unit.
      std::vector<int> cands;
      for (int m = 0; m < n; ++m) {
        if (parent[m] < 0 || find(m) != c) continue;
        for (int nb : neighbors(m)) {
          const int r = find(nb);
          if (r != c && std::find(cands.begin(), cands.end(), r) == cands.end()) cands.push_back(r);
        }
      }
      if (cands.empty()) throw Error(ErrorCode::MergeFailure, "no nonempty neighbor to merge a small cell into");
      int best = -1;
      for (int r : cands) {
        if (best < 0) {
          best = r;
          continue;
        }
        if (!small_vol && short_cut) {
          // Prefer interface hosts with the longest cut boundary.
          const auto key = [&](int u) { return std::make_pair(iface[u] ? len[u] : -1.0, vol[u]); };
          if (key(r) > key(best)) best = r;
        } else {
          // Prefer hosts large enough on their own, then compact units.
          const auto key = [&](int u) { return std::make_tuple(vol[u] >= eps * h * h, -members[u], vol[u]); };
          if (key(r) > key(best)) best = r;
        }
      }
      parent[c] = best;
      members[best] += members[c];
      vol[best] += vol[c];
      len[best] += len[c];
      iface[best] = iface[best] || iface[c];
      changed = true;
    }
    if (!changed) break;
  }
  for (int c = 0; c < n; ++c)
    if (parent[c] >= 0) grid.set_host(c, find(c));
  grid.rebuild_units();
  return grid;
}

}  // namespace slfv
