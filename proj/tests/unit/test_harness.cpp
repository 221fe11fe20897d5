#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "slfv/harness/cases.hpp"
#include "slfv/harness/checks.hpp"
#include "slfv/harness/config_file.hpp"
#include "slfv/harness/convergence.hpp"
#include "slfv/harness/expression.hpp"
#include "slfv/harness/norms.hpp"

using namespace slfv;

namespace {

const std::string kSamples = std::string(SLFV_SOURCE_DIR) + "/samples/";

CutCellGrid box(int n) {
  GridSpec g;
  g.origin = {0, 0};
  g.h = 1.0 / n;
  g.nx = g.ny = n;
  return box_grid(g, false);
}

std::vector<double> cell_averages(const CutCellGrid& g, const std::function<double(const Point2&)>& f) {
  const auto rules = build_cell_rules(g, 4, 9);
  std::vector<double> v(g.unit_count());
  for (int u = 0; u < g.unit_count(); ++u) v[u] = rules[u].average(f);
  return v;
}

boost::property_tree::ptree ini(const std::string& text) {
  boost::property_tree::ptree pt;
  std::istringstream in(text);
  boost::property_tree::read_ini(in, pt);
  return pt;
}

}  // namespace

TEST(Norms, ZeroOnesAndRandom) {
  const std::vector<double> vol(16, 1.0 / 16);
  const auto z = norms(std::vector<double>(16, 0.0), vol);
  EXPECT_EQ(z.l1, 0.0);
  EXPECT_EQ(z.l2, 0.0);
  EXPECT_EQ(z.linf, 0.0);
  const auto o = norms(std::vector<double>(16, 1.0), vol);
  EXPECT_NEAR(o.l1, 1.0, 1e-15);
  EXPECT_NEAR(o.l2, 1.0, 1e-15);
  EXPECT_EQ(o.linf, 1.0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.1, 1.0);
  std::vector<double> g(100), v(100);
  for (int i = 0; i < 100; ++i) {
    g[i] = u(rng);
    v[i] = w(rng);
  }
  double l1 = 0, l2 = 0, li = 0, area = 0;
  for (int i = 0; i < 100; ++i) {
    l1 += v[i] * std::abs(g[i]);
    l2 += v[i] * g[i] * g[i];
    li = std::max(li, std::abs(g[i]));
    area += v[i];
  }
  const auto n = norms(g, v);
  EXPECT_NEAR(n.l1, l1, 1e-13);
  EXPECT_NEAR(n.l2, std::sqrt(l2), 1e-13);
  EXPECT_EQ(n.linf, li);
  EXPECT_TRUE(norms_ordered(n, area));
  EXPECT_FALSE(norms_ordered({2.0, 1.0, 1.0}, 1.0));
  EXPECT_THROW(norms(g, std::vector<double>(3, 1.0)), Error);
}

TEST(Norms, ConvergenceRate) {
  EXPECT_NEAR(convergence_rate(16.0, 1.0, 2.0), 4.0, 1e-15);
  EXPECT_NEAR(convergence_rate(1e-3, 1e-3 / 64, 2.0), 6.0, 1e-12);
  EXPECT_TRUE(std::isnan(convergence_rate(0.0, 1.0, 2.0)));
}

TEST(Richardson, IdenticalAndRestrictedFields) {
  const auto coarse = box(8), fine = box(16);
  EXPECT_EQ(refinement_ratio(coarse, fine), 2);
  auto f = [](const Point2& p) { return std::sin(3 * p.x) * std::exp(p.y); };
  // Exact averages on both grids aggregate consistently.
  const auto e = richardson_error(cell_averages(coarse, f), coarse, cell_averages(fine, f), fine);
  for (double v : e) EXPECT_NEAR(v, 0.0, 1e-12);
  const auto z = richardson_error(std::vector<double>(64, 1.5), coarse, std::vector<double>(256, 1.5), fine);
  for (double v : z) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(Richardson, ManufacturedOffset) {
  const auto coarse = box(4), fine = box(8);
  std::vector<double> fr(64);
  for (int idx = 0; idx < 64; ++idx) fr[fine.unit_of_cell(idx)] = fine.spec().col(idx) % 2 ? 1.0 : 3.0;
  const auto e = richardson_error(std::vector<double>(16, 2.5), coarse, fr, fine);
  for (double v : e) EXPECT_NEAR(v, 0.5, 1e-15);
}

TEST(Richardson, GridMismatch) {
  EXPECT_THROW(refinement_ratio(box(8), box(12)), Error);
  EXPECT_THROW(refinement_ratio(box(8), box(8)), Error);
  EXPECT_THROW(richardson_error(std::vector<double>(3, 0.0), box(4), std::vector<double>(64, 0.0), box(8)), Error);
  try {
    refinement_ratio(box(8), box(12));
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
  }
}

TEST(RunConvergence, InputErrors) {
  const auto c = cases::swirl();
  EXPECT_THROW(run_convergence(c, 4, {16}), Error);
  EXPECT_THROW(run_convergence(c, 4, {16, 32, 48}), Error);
  EXPECT_THROW(run_convergence(c, 4, {32, 16}), Error);
}

TEST(RunConvergence, SwirlRichardsonReportAndCsv) {
  auto c = cases::swirl();
  c.spec.final_time = 0.5;
  const auto rep = run_convergence(c, 4, {16, 32, 64});
  ASSERT_TRUE(rep.richardson);
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_EQ(rep.rows[0].label, "1/16-1/32");
  EXPECT_TRUE(std::isnan(rep.rows[0].rate.linf));
  EXPECT_GT(rep.rows[1].rate.l1, 3.0);
  EXPECT_TRUE(rep.norms_consistent());
  std::ostringstream csv;
  rep.write_csv(csv);
  std::string header;
  std::getline(std::istringstream(csv.str()) >> std::ws, header);
  EXPECT_EQ(header.rfind("case,order,method,label,n,h,k,steps,L1,L2,Linf", 0), 0u);
  EXPECT_NE(csv.str().find("swirl,4,richardson,1/32-1/64"), std::string::npos);
}

TEST(Expression, PrecedenceAndFunctions) {
  EXPECT_DOUBLE_EQ(Expression("1 + 2 * 3")(0, 0, 0), 7.0);
  EXPECT_DOUBLE_EQ(Expression("(1 + 2) * 3")(0, 0, 0), 9.0);
  EXPECT_DOUBLE_EQ(Expression("2 ^ 3 ^ 2")(0, 0, 0), 512.0);
  EXPECT_DOUBLE_EQ(Expression("-x^2")(3, 0, 0), -9.0);
  EXPECT_DOUBLE_EQ(Expression("x - y - t")(5, 2, 1), 2.0);
  EXPECT_DOUBLE_EQ(Expression("8 / 4 / 2")(0, 0, 0), 1.0);
  EXPECT_NEAR(Expression("sin(pi / 2) + cos(0) + exp(0)")(0, 0, 0), 3.0, 1e-15);
  EXPECT_NEAR(Expression("sin(x + y + t)")(0.1, 0.2, 0.3), std::sin(0.6), 1e-15);
  EXPECT_DOUBLE_EQ(Expression("1e-3 * 2")(0, 0, 0), 2e-3);
  EXPECT_TRUE(Expression("0").is_zero_literal());
  EXPECT_FALSE(Expression("x").is_zero_literal());
}

TEST(Expression, ParseErrors) {
  for (const char* bad : {"", "1 +", "(x", "x)", "foo(x)", "z", "2 * * 3", "sin x"}) {
    try {
      Expression e(bad);
      ADD_FAILURE() << "accepted '" << bad << "'";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ParseError) << bad;
    }
  }
}

TEST(Cases, LibraryDefinitions) {
  const auto t = case_library("trapezoid");
  EXPECT_NEAR(t.spec.source({0, 0}, 0), 1.0, 1e-15);
  ASSERT_TRUE(t.has_exact());
  const auto s = case_library("swirl");
  const Vec2 u0 = s.spec.velocity({0.3, 0.4}, 0.0);
  EXPECT_EQ(u0.x, 0.0);
  EXPECT_EQ(u0.y, 0.0);
  const auto m = cases::mixing([](double) { return 1.0; }, [](double) { return 0.0; });
  const Vec2 um = m.spec.velocity({0.25, 0.25}, 0.0);
  EXPECT_NEAR(um.x, 0.0, 1e-15);
  EXPECT_NEAR(um.y, 0.0, 1e-15);
  EXPECT_EQ(case_ids().size(), 5u);
  try {
    case_library("vortex");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownCase);
  }
  EXPECT_THROW(case_library("custom"), Error);
  const auto r = case_library("rotation");
  EXPECT_NEAR(r.h_for(100), 2 * std::numbers::pi / 100, 1e-15);
}

TEST(CoefficientTable, LinearDataAndClamping) {
  const CoefficientTable lin({0.0, 1.0, 2.0, 3.0, 4.0}, {1.0, 3.0, 5.0, 7.0, 9.0});
  for (double t : {0.0, 0.3, 1.7, 2.5, 4.0}) EXPECT_NEAR(lin(t), 1.0 + 2.0 * t, 1e-14);
  EXPECT_EQ(lin(-1.0), 1.0);
  EXPECT_EQ(lin(10.0), 9.0);
  EXPECT_THROW(CoefficientTable({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0}), Error);
  EXPECT_THROW(CoefficientTable({0.0, 2.0, 1.0, 3.0}, {0.0, 1.0, 2.0, 3.0}), Error);
}

TEST(Config, ParseListAndErrors) {
  EXPECT_EQ(parse_list<int>("32, 64,128"), (std::vector<int>{32, 64, 128}));
  EXPECT_EQ(parse_list<double>("0.5 1"), (std::vector<double>{0.5, 1.0}));
  EXPECT_THROW(parse_list<int>("32, x"), Error);
}

TEST(Config, LoadCustomFromIni) {
  const auto rc = load_config(ini(R"(
[solver]
order = 6
grids = 16, 32
final_time = 0.4
k_over_h = 2
[domain]
kind = periodic
[velocity]
u = 1
v = 0.5
[initial]
expr = sin(2 * pi * x)
exact = sin(2 * pi * (x - t))
)"));
  EXPECT_EQ(rc.bench.id, "custom");
  EXPECT_EQ(rc.solver.order, 6);
  EXPECT_EQ(rc.grids, (std::vector<int>{16, 32}));
  EXPECT_EQ(rc.bench.spec.final_time, 0.4);
  EXPECT_EQ(rc.bench.step.k_over_h, 2.0);
  EXPECT_EQ(rc.bench.spec.domain_kind, DomainKind::PeriodicRectangle);
  EXPECT_EQ(rc.bench.spec.velocity({0, 0}, 0).y, 0.5);
  EXPECT_TRUE(rc.bench.has_exact());
  EXPECT_NEAR((*rc.bench.exact)({0.3, 0}, 0.1), std::sin(2 * std::numbers::pi * 0.2), 1e-15);
}

TEST(Config, OverrideBuiltInCase) {
  const auto rc = load_config(ini("[solver]\ncase = rotation\norder = 8\ncfl = 0.95\n"));
  EXPECT_EQ(rc.bench.id, "rotation");
  EXPECT_EQ(rc.bench.step.cfl, 0.95);
  EXPECT_EQ(rc.bench.step.k_over_h, 0.0);
  EXPECT_EQ(rc.solver.order, 8);
}

TEST(Config, Errors) {
  auto code = [](const std::string& text) {
    try {
      load_config(ini(text));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code("[velocity]\nu = 1\nv = 0\n[initial]\nexpr = 1\n"), ErrorCode::ParseError);  // no step rule
  EXPECT_EQ(code("[velocity]\nu = 1\n[initial]\nexpr = 1\n[solver]\nk = 0.1\n"), ErrorCode::ParseError);
  EXPECT_EQ(code("[domain]\nkind = torus\n[solver]\ncase = swirl\n"), ErrorCode::ParseError);
  EXPECT_EQ(code("[solver]\ncase = swirl\norder = four\n"), ErrorCode::ParseError);
  EXPECT_EQ(code("[solver]\ncase = vortex\n"), ErrorCode::UnknownCase);
  EXPECT_EQ(code("[solver]\ncase = mixing\n[velocity]\nfield = mixing\nalpha1 = 1,2,3,4\n"), ErrorCode::ParseError);
}

TEST(Config, SampleFiles) {
  const auto flower = load_config_file(kSamples + "flower.ini");
  EXPECT_EQ(flower.bench.id, "custom");
  ASSERT_TRUE(flower.bench.spec.splinegon);
  EXPECT_EQ(flower.bench.spec.domain_kind, DomainKind::Splinegon);
  EXPECT_GT(flower.bench.spec.splinegon->area(), 0.3);
  EXPECT_EQ(flower.grids, (std::vector<int>{32, 64}));

  const auto mix = load_config_file(kSamples + "mixing_table.ini");
  EXPECT_EQ(mix.bench.id, "mixing");
  // At t = 0 only the first cell field acts, with alpha1 = 1.
  const Vec2 u = mix.bench.spec.velocity({0.1, 0.2}, 0.0);
  const Vec2 u1 = cases::mixing_u1({0.1, 0.2});
  EXPECT_NEAR(u.x, u1.x, 1e-14);
  EXPECT_NEAR(u.y, u1.y, 1e-14);

  const auto rot = load_config_file(kSamples + "rotation_o8.ini");
  EXPECT_EQ(rot.solver.order, 8);
  EXPECT_EQ(rot.bench.step.cfl, 0.95);
  EXPECT_THROW(load_config_file(kSamples + "missing.ini"), Error);
}

TEST(Checks, ReconstructionOnBox) {
  auto c = cases::swirl();
  const Solver s(c.spec, case_config(c, 4, 16));
  const auto res = check_reconstruction(s, 20);
  ASSERT_FALSE(res.empty());
  for (const auto& r : res) EXPECT_LT(r.max_err, 1e-9) << to_string(r.kind);
}
