#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mhd/cases.hpp"
#include "mhd/diagnostics.hpp"
#include "oracle/oracle.hpp"

using namespace mhd;

namespace {

DiscretizationPtr unit_square(int degree, int k, Stretch stretch = Stretch::uniform) {
  const auto mesh = std::make_shared<const Mesh>(Bounds{0, 1, 0, 1}, k, k,
                                                 std::array<Stretch, 2>{stretch, stretch},
                                                 std::array<bool, 2>{false, false});
  return build_discretization(mesh, degree);
}

}  // namespace

TEST(Energy, ZeroFields) {
  const auto d = unit_square(2, 3);
  EXPECT_EQ(kinetic_energy(*d, Field(d->D)), 0.0);
  EXPECT_EQ(magnetic_energy(*d, Field(d->C), 1.0), 0.0);
}

TEST(Energy, ConstantFields) {
  const auto d = unit_square(2, 3, Stretch::boundary_refined);
  const Field u = project(d->D, [](double, double) { return Vec2{1.0, 2.0}; });
  EXPECT_NEAR(kinetic_energy(*d, u), 2.5, 1e-13);
  const Field h = project(d->C, [](double, double) { return Vec2{0.0, 1.0}; });
  EXPECT_NEAR(magnetic_energy(*d, h, 0.25), 0.125, 1e-13);
}

TEST(Energy, MatchesQuadratureOracle) {
  const auto d = unit_square(3, 2);
  const Field u = oracle::random_field(d->D, 5);
  const double direct = 0.5 * u.coeffs.dot(d->mass(SpaceKind::D) * u.coeffs);
  EXPECT_NEAR(kinetic_energy(*d, u), direct, 1e-13 * direct);
}

TEST(Energy, OrszagTangInitialEnergy) {
  const CaseSpec s = orszag_tang_case(4, 8);
  const auto d = build_discretization(s.build_mesh(), s.degree);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double k = kinetic_energy(*d, project(d->D, s.u0));
  const double m = magnetic_energy(*d, project(d->C, s.H0), 1.0);
  EXPECT_NEAR(k, 8.0 * pi2, 1e-5 * pi2);
  EXPECT_NEAR(m, 8.0 * pi2, 1e-5 * pi2);
}

TEST(Divergence, ProjectedSolenoidalVelocity) {
  const auto d = unit_square(3, 3);
  const Field u = project(d->D, [](double x, double y) {
    return Vec2{std::sin(x) * std::cos(y), -std::cos(x) * std::sin(y)};
  });
  EXPECT_LE(divergence_u_l2(*d, u), 1e-13);
}

TEST(Divergence, LowestOrderEdgeFieldIsElementwiseSolenoidal) {
  const auto d = unit_square(1, 4);
  const ElementDivergence e = divergence_h_elementwise(*d, oracle::random_field(d->C, 8));
  EXPECT_LE(e.l2, 1e-13);
  EXPECT_LE(e.max_element, 1e-13);
}

TEST(Divergence, HigherOrderFieldHasElementwiseDivergence) {
  const auto d = unit_square(2, 2);
  const Field h = project(d->C, [](double x, double y) { return Vec2{x + x * y, y}; });
  const ElementDivergence e = divergence_h_elementwise(*d, h);
  // div H = 2 + y, whose L2 norm on the unit square is sqrt(19/3).
  EXPECT_NEAR(e.l2, std::sqrt(19.0 / 3.0), 1e-12);
  EXPECT_LE(e.max_element, e.l2);
}

TEST(Sampling, ConstantAndVectorMagnitude) {
  const auto d = unit_square(2, 2);
  const Field p = project(d->S, [](double, double) { return -3.0; });
  EXPECT_NEAR(max_abs_sampled(p, 4), 3.0, 1e-13);
  const Field u = project(d->D, [](double, double) { return Vec2{3.0, 4.0}; });
  EXPECT_NEAR(max_abs_sampled(u, 3), 5.0, 1e-13);
  EXPECT_THROW(max_abs_sampled(p, 1), std::invalid_argument);
}

TEST(StreamFunction, RecoversPotential) {
  const auto d = unit_square(3, 3, Stretch::boundary_refined);
  Field psi = oracle::random_field(d->G, 17);
  psi.coeffs.array() -= psi.coeffs[d->G->node_index(0, 0)];
  const Field u(d->D, d->perp_grad * psi.coeffs);
  const Field back = stream_function(*d, u);
  EXPECT_LE((back.coeffs - psi.coeffs).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(StreamFunction, EdgeFieldOfGradientPotential) {
  const auto d = unit_square(2, 2);
  const Field h = project(d->C, [](double x, double) { return Vec2{0.0, -2.0 * x}; });
  const Field psi = stream_function(*d, h);
  const double at = evaluate_scalar(psi, 0.5, 0.25);
  EXPECT_NEAR(at, 0.25, 1e-12);
}

TEST(StreamFunction, ConstantFlowFollowsPerpGradConvention) {
  const auto d = unit_square(2, 2);
  const Field u = project(d->D, [](double, double) { return Vec2{0.0, 1.0}; });
  const Field psi = stream_function(*d, u);
  EXPECT_NEAR(evaluate_scalar(psi, 0.7, 0.3), -0.7, 1e-13);
}

TEST(Budget, RequiresConsecutiveRecords) {
  DiagnosticsRecord a, b;
  a.k = 3;
  b.k = 5;
  EXPECT_THROW(budget_residual(b, a, PhysParams{}), std::invalid_argument);
}

TEST(Budget, ResidualOfConsistentRecords) {
  PhysParams p{10.0, 20.0, 0.5, 0.1};
  DiagnosticsRecord prev, cur;
  prev.k = 1;
  prev.Etilde = 1.0;
  cur.k = 2;
  cur.F = 0.3;
  cur.S = 2.0;
  cur.Jtilde = 4.0;
  cur.A = 0.6;
  cur.Atilde = 0.2;
  const double rate = 0.3 - 2.0 / 10.0 - 0.5 * 4.0 / 20.0 + 0.5 * (0.6 - 0.2);
  cur.Etilde = 1.0 + 0.1 * rate;
  EXPECT_NEAR(budget_residual(cur, prev, p), 0.0, 1e-14);
  cur.Etilde += 0.01;
  EXPECT_NEAR(budget_residual(cur, prev, p), 0.1, 1e-12);
}
