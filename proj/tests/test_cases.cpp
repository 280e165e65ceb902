#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mhd/cases.hpp"
#include "mhd/diagnostics.hpp"
#include "oracle/oracle.hpp"

using namespace mhd;

namespace {

oracle::StrongFields strong(const ManufacturedSolution& m) {
  auto wrap = [](const Expr& e) {
    return oracle::PointFn([e](double x, double y, double t) { return e(x, y, t); });
  };
  oracle::StrongFields s;
  s.ux = wrap(m.ux);
  s.uy = wrap(m.uy);
  s.omega = wrap(m.omega);
  s.P = wrap(m.P);
  s.Hx = wrap(m.Hx);
  s.Hy = wrap(m.Hy);
  s.E = wrap(m.E);
  s.j = wrap(m.j);
  s.fx = wrap(m.fx);
  s.fy = wrap(m.fy);
  s.e = wrap(m.e);
  s.Rf = m.Rf;
  s.Rm = m.Rm;
  s.c = m.c;
  return s;
}

struct Point {
  double x, y, t;
};

std::vector<Point> sample_points(unsigned seed, int n) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> xy(0.0, 2.0 * std::numbers::pi), t(0.0, 1.0);
  std::vector<Point> p;
  for (int i = 0; i < n; ++i) p.push_back({xy(gen), xy(gen), t(gen)});
  return p;
}

}  // namespace

TEST(Manufactured, VelocityIsDivergenceFree) {
  const ManufacturedSolution m = mms_build(1.0, 1.0, 1.0);
  const Expr div = m.ux.diff(Var::x) + m.uy.diff(Var::y);
  for (const Point& p : sample_points(11, 100)) EXPECT_LE(std::abs(div(p.x, p.y, p.t)), 1e-12);
}

TEST(Manufactured, MagneticFieldVanishesInitially) {
  const ManufacturedSolution m = mms_build(1.0, 1.0, 1.0);
  for (const Point& p : sample_points(12, 20)) {
    EXPECT_EQ(m.Hx(p.x, p.y, 0.0), 0.0);
    EXPECT_EQ(m.Hy(p.x, p.y, 0.0), 0.0);
  }
}

TEST(Manufactured, StrongResidualVanishes) {
  for (auto [rf, rm, c] : {std::array<double, 3>{1.0, 1.0, 1.0}, {100.0, 10.0, 0.5}}) {
    const ManufacturedSolution m = mms_build(rf, rm, c);
    const oracle::StrongFields s = strong(m);
    for (const Point& p : sample_points(13, 50)) {
      EXPECT_LE(oracle::fd_residual(s, p.x, p.y, p.t).max(), 1e-6);
    }
  }
}

TEST(Manufactured, CorruptedForcingIsDetected) {
  const ManufacturedSolution m = mms_build(1.0, 1.0, 1.0);
  oracle::StrongFields s = strong(m);
  const oracle::PointFn fx = s.fx;
  s.fx = [fx](double x, double y, double t) { return fx(x, y, t) + 0.05; };
  EXPECT_GE(oracle::fd_residual(s, 0.3, 0.7, 0.5).momentum, 1e-2);
}

TEST(Manufactured, VectorAccessorsMatchComponents) {
  const ManufacturedSolution m = mms_build(1.0, 1.0, 1.0);
  const Vec2 u = m.u_fn()(0.4, 0.9, 0.3);
  EXPECT_EQ(u[0], m.ux(0.4, 0.9, 0.3));
  EXPECT_EQ(u[1], m.uy(0.4, 0.9, 0.3));
  const Vec2 h = m.H_fn()(0.4, 0.9, 0.3);
  EXPECT_EQ(h[1], m.Hy(0.4, 0.9, 0.3));
}

TEST(Cases, OrszagTangInitialValues) {
  const CaseSpec s = orszag_tang_case();
  const Vec2 u = s.u0(0.0, 0.0);
  EXPECT_NEAR(u[0], 2.0, 1e-15);
  EXPECT_NEAR(u[1], 0.0, 1e-15);
  const Vec2 h = s.H0(0.0, 0.0);
  EXPECT_NEAR(h[0], 0.0, 1e-15);
  EXPECT_NEAR(h[1], 0.0, 1e-15);
  EXPECT_EQ(s.kx, 48);
  EXPECT_EQ(s.degree, 4);
  EXPECT_TRUE(s.periodic[0] && s.periodic[1]);
}

TEST(Cases, CavityInitialMagneticEnergy) {
  const CaseSpec s = lid_driven_cavity_case(2, 4, 1e-3, 1e-5, 400.0, 400.0, 0.0);
  EXPECT_DOUBLE_EQ(s.params.c, 1.0 / 400.0);
  const auto disc = build_discretization(s.build_mesh(), s.degree);
  const Field H0 = project(disc->C, s.H0);
  EXPECT_NEAR(magnetic_energy(*disc, H0, s.params.c), 1.0 / 800.0, 1e-14);
}

TEST(Cases, MakeCaseAppliesOverrides) {
  CaseOverrides o;
  o.degree = 2;
  o.kx = 5;
  o.dt = 0.02;
  o.Rm = 50.0;
  const CaseSpec s = make_case("conservation", o);
  EXPECT_EQ(s.degree, 2);
  EXPECT_EQ(s.kx, 5);
  EXPECT_DOUBLE_EQ(s.params.dt, 0.02);
  EXPECT_DOUBLE_EQ(s.params.Rm, 50.0);
  EXPECT_TRUE(std::isinf(s.params.Rf));
}

TEST(Cases, MakeCaseRejectsUnknownName) {
  EXPECT_THROW(make_case("kelvin-helmholtz"), std::invalid_argument);
  for (const std::string& n : case_names()) EXPECT_NO_THROW(make_case(n));
}

TEST(Cases, FitSlopeOfPowerLaw) {
  const std::vector<double> x{0.1, 0.2, 0.4};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * v * v);
  EXPECT_NEAR(fit_slope(x, y), 2.0, 1e-12);
}

TEST(Cases, ManufacturedErrorsVanishForExactInterpolant) {
  const CaseSpec s = mms_case(3, 4, 0.1, 0.1);
  const auto disc = build_discretization(s.build_mesh(), s.degree);
  const ManufacturedSolution& m = *s.mms;
  State st;
  st.u = project(disc->D, [&](double x, double y) { return m.u_fn()(x, y, 0.0); });
  st.omega = project(disc->G, [&](double x, double y) { return m.omega(x, y, 0.0); });
  st.P = project(disc->S, [&](double x, double y) { return m.P(x, y, 0.0); });
  st.H = project(disc->C, [&](double x, double y) { return m.H_fn()(x, y, 0.0); });
  const ErrorNorms e = mms_errors(*disc, st, m, 0.1);
  EXPECT_LE(e.u_l2, 1e-3);
  EXPECT_LE(e.P_l2, 1e-2);
  EXPECT_EQ(e.H_l2, 0.0);
}

TEST(Cases, CenterlineOfZeroState) {
  const CaseSpec s = lid_driven_cavity_case(2, 4);
  const auto disc = build_discretization(s.build_mesh(), s.degree);
  State st{Field(disc->D), Field(disc->G), Field(disc->S), Field(disc->C)};
  const auto rows = centerline_extract(st, true);
  ASSERT_EQ(rows.size(), centerline_stations().size());
  for (const auto& r : rows) {
    EXPECT_DOUBLE_EQ(r.y, 0.5);
    EXPECT_EQ(r.u, 0.0);
  }
}
