#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "slfv/harness/cases.hpp"
#include "slfv/harness/expression.hpp"

namespace slfv {

/// Everything a config file can set.
struct RunConfig {
  BenchmarkCase bench;
  SolverConfig solver;   ///< order, step rule and numerical overrides; h comes from the grid list
  std::vector<int> grids;
  std::string out_dir;
  std::vector<double> dump_times;
  bool dump_reconstruction{false};
};

/// Whitespace- or comma-separated numbers.
template <class T>
std::vector<T> parse_list(const std::string& s) {
  std::string t = s;
  for (char& c : t)
    if (c == ',') c = ' ';
  std::istringstream in(t);
  std::vector<T> out;
  T v;
  while (in >> v) out.push_back(v);
  if (!in.eof()) throw Error(ErrorCode::ParseError, "bad number list '" + s + "'");
  return out;
}

inline ScalarField expression_field(const std::string& src) {
  Expression e(src);
  if (e.is_zero_literal()) return ScalarField::zero();
  return {[e](const Point2& p, double t) { return e(p.x, p.y, t); }, false};
}

namespace detail {

/// Optional typed value; unlike ptree::get with a default, rejects text that
/// does not convert completely.
template <class T>
T value(const boost::property_tree::ptree& sec, const std::string& key, T fallback) {
  const auto raw = sec.get_optional<std::string>(key);
  if (!raw) return fallback;
  if constexpr (std::is_same_v<T, bool>) {
    if (*raw == "true" || *raw == "1") return true;
    if (*raw == "false" || *raw == "0") return false;
  }
  std::istringstream in(*raw);
  T v{};
  if (std::is_same_v<T, bool> || !(in >> v) || !(in >> std::ws).eof())
    throw Error(ErrorCode::ParseError, "config key '" + key + "': cannot parse '" + *raw + "'");
  return v;
}

inline Point2 parse_point(const std::string& s) {
  const auto v = parse_list<double>(s);
  if (v.size() != 2) throw Error(ErrorCode::ParseError, "expected two coordinates, got '" + s + "'");
  return {v[0], v[1]};
}

inline std::function<double(double)> coefficient(const boost::property_tree::ptree& sec, const std::string& name) {
  const auto t = sec.get_optional<std::string>(name + "_t");
  const auto v = sec.get_optional<std::string>(name);
  if (!t && !v) return {};
  if (!t || !v) throw Error(ErrorCode::ParseError, "[velocity] needs both " + name + "_t and " + name);
  return CoefficientTable(parse_list<double>(*t), parse_list<double>(*v));
}

}  // namespace detail

/// Builds a run from an INI tree. `[solver] case` (or `base`) selects a
/// built-in case to start from; otherwise every field must be given.
inline RunConfig load_config(const boost::property_tree::ptree& pt, const std::string& base_dir = ".",
                             const std::optional<BenchmarkCase>& base = std::nullopt) {
  using boost::property_tree::ptree;
  RunConfig rc;
  static const ptree empty;
  auto section = [&](const char* name) -> const ptree& {
    const auto s = pt.get_child_optional(name);
    return s ? *s : empty;
  };
  const ptree& dom = section("domain");
  const ptree& vel = section("velocity");
  const ptree& sol = section("solver");
  const ptree& out = section("output");

  if (const auto id = sol.get_optional<std::string>("case")) rc.bench = case_library(*id);
  else if (base) rc.bench = *base;
  else rc.bench.id = "custom";
  BenchmarkCase& b = rc.bench;
  ProblemSpec& ps = b.spec;

  try {
    if (const auto kind = dom.get_optional<std::string>("kind")) {
      if (*kind == "box") ps.domain_kind = DomainKind::Rectangle;
      else if (*kind == "periodic") ps.domain_kind = DomainKind::PeriodicRectangle;
      else if (*kind == "splinegon") ps.domain_kind = DomainKind::Splinegon;
      else throw Error(ErrorCode::ParseError, "[domain] kind must be box, periodic or splinegon");
    }
    if (const auto s = dom.get_optional<std::string>("lo")) ps.box_lo = detail::parse_point(*s);
    if (const auto s = dom.get_optional<std::string>("hi")) ps.box_hi = detail::parse_point(*s);
    if (const auto f = dom.get_optional<std::string>("file")) {
      std::filesystem::path p(*f);
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      ps.splinegon = std::make_shared<SplinegonDomain>(read_domain_file(p.string()));
      if (!dom.get_optional<std::string>("kind")) ps.domain_kind = DomainKind::Splinegon;
    }
    if (ps.domain_kind == DomainKind::Splinegon && !ps.splinegon)
      throw Error(ErrorCode::ParseError, "[domain] kind = splinegon needs file");
    b.length_unit = detail::value(dom, "length_unit", b.length_unit);
    b.volume_scale = detail::value(dom, "volume_scale", b.volume_scale);

    if (const auto f = vel.get_optional<std::string>("field")) {
      if (*f == "mixing") {
        ps.velocity = cases::mixing(detail::coefficient(vel, "alpha1"), detail::coefficient(vel, "alpha2")).spec.velocity;
      } else if (*f != "custom") {
        const BenchmarkCase named = case_library(*f);
        ps.velocity = named.spec.velocity;
        ps.speed_sum = named.spec.speed_sum;
      }
    }
    const auto u = vel.get_optional<std::string>("u");
    const auto v = vel.get_optional<std::string>("v");
    if (u || v) {
      if (!u || !v) throw Error(ErrorCode::ParseError, "[velocity] needs both u and v");
      const Expression eu(*u), ev(*v);
      const bool zero = eu.is_zero_literal() && ev.is_zero_literal();
      ps.velocity = zero ? VelocityField::zero()
                         : VelocityField{[eu, ev](const Point2& p, double t) { return Vec2{eu(p.x, p.y, t), ev(p.x, p.y, t)}; },
                                         0.0, false};
      ps.speed_sum = 0.0;
    }
    ps.velocity.max_speed = detail::value(vel, "max_speed", ps.velocity.max_speed);
    ps.speed_sum = detail::value(vel, "speed_sum", ps.speed_sum);

    if (const auto s = section("source").get_optional<std::string>("expr")) ps.source = expression_field(*s);
    if (const auto s = section("initial").get_optional<std::string>("expr")) ps.initial = expression_field(*s);
    if (const auto s = section("initial").get_optional<std::string>("exact")) b.exact = expression_field(*s);
    if (const auto s = section("boundary").get_optional<std::string>("expr")) {
      if (*s == "none") ps.boundary.reset();
      else ps.boundary = expression_field(*s);
    }

    SolverConfig& sc = rc.solver;
    sc.order = detail::value(sol, "order", sc.order);
    ps.final_time = detail::value(sol, "final_time", ps.final_time);
    if (const auto s = sol.get_optional<std::string>("grids")) rc.grids = parse_list<int>(*s);
    sc.k = detail::value(sol, "k", 0.0);
    if (sol.count("k_over_h")) b.step = {detail::value(sol, "k_over_h", 0.0), 0.0};
    if (sol.count("cfl")) b.step = {0.0, detail::value(sol, "cfl", 0.0)};
    sc.merge_eps = detail::value(sol, "merge_eps", sc.merge_eps);
    sc.substeps = detail::value(sol, "substeps", sc.substeps);
    sc.threads = detail::value(sol, "threads", sc.threads);
    sc.cond_cap = detail::value(sol, "cond_cap", sc.cond_cap);
    sc.m_pure = detail::value(sol, "m_pure", sc.m_pure);
    sc.m_interface = detail::value(sol, "m_interface", sc.m_interface);
    sc.m_boundary = detail::value(sol, "m_boundary", sc.m_boundary);
    sc.newton.tol_rel = detail::value(sol, "newton_tol", sc.newton.tol_rel);
    sc.newton.max_iter = detail::value(sol, "newton_max_iter", sc.newton.max_iter);

    rc.out_dir = out.get("dir", std::string{});
    if (const auto s = out.get_optional<std::string>("dump_times")) rc.dump_times = parse_list<double>(*s);
    rc.dump_reconstruction = detail::value(out, "dump_reconstruction", false);
  } catch (const boost::property_tree::ptree_error& e) {
    throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
  }

  if (!ps.velocity.fn && !ps.velocity.is_zero) throw Error(ErrorCode::ParseError, "config defines no velocity");
  if (!ps.initial.fn && !ps.initial.is_zero) throw Error(ErrorCode::ParseError, "config defines no initial data");
  if (!(b.step.k_over_h > 0.0) && !(b.step.cfl > 0.0) && !(rc.solver.k > 0.0))
    throw Error(ErrorCode::ParseError, "config defines no time step rule (k, k_over_h or cfl)");
  return rc;
}

inline RunConfig load_config_file(const std::string& path, const std::optional<BenchmarkCase>& base = std::nullopt) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::read_ini(path, pt);
  } catch (const boost::property_tree::ptree_error& e) {
    throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
  }
  const auto dir = std::filesystem::path(path).parent_path();
  return load_config(pt, dir.empty() ? "." : dir.string(), base);
}

}  // namespace slfv
