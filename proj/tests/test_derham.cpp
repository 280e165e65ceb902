#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mhd/derham.hpp"

using namespace mhd;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const Mesh> square(int k, bool periodic = false, double len = 1.0) {
  return std::make_shared<const Mesh>(Bounds{0, len, 0, len}, k, k,
                                      std::array<Stretch, 2>{Stretch::uniform, Stretch::uniform},
                                      std::array<bool, 2>{periodic, periodic});
}

std::shared_ptr<const Mesh> stretched(int k) {
  return std::make_shared<const Mesh>(
      Bounds{0, 1, 0, 1}, k, k,
      std::array<Stretch, 2>{Stretch::boundary_refined, Stretch::boundary_refined},
      std::array<bool, 2>{false, false});
}

double l2_error(const Field& f, const ScalarFunction& exact) {
  const TensorRule rule = TensorRule::gauss(f.sp().degree() + 6);
  const ElementEvaluator ev(f.sp(), rule);
  double s = 0.0;
  for (int e = 0; e < f.sp().mesh().num_elements(); ++e) {
    const LocalBasis lb = ev.evaluate(e);
    const Eigen::VectorXd v = lb.comp[0].transpose() * f.local(e);
    for (int q = 0; q < v.size(); ++q) {
      const double d = v[q] - exact(lb.points[q][0], lb.points[q][1]);
      s += lb.weights[q] * d * d;
    }
  }
  return std::sqrt(s);
}

}  // namespace

TEST(Space, DofCounts) {
  EXPECT_EQ(build_space(square(2), SpaceKind::S, 1)->dof_count(), 4);
  EXPECT_EQ(build_space(square(2), SpaceKind::G, 1)->dof_count(), 9);
  EXPECT_EQ(build_space(square(2, true), SpaceKind::G, 1)->dof_count(), 4);
  // C and D: two edge families of (KN)(KN+1) each.
  EXPECT_EQ(build_space(square(3), SpaceKind::C, 2)->dof_count(), 2 * 6 * 7);
  EXPECT_EQ(build_space(square(3), SpaceKind::D, 2)->dof_count(), 2 * 6 * 7);
  EXPECT_EQ(build_space(square(3, true), SpaceKind::D, 2)->dof_count(), 2 * 36);
  EXPECT_EQ(build_space(square(3, true), SpaceKind::S, 2)->dof_count(), 36);
  EXPECT_THROW(build_space(square(2), SpaceKind::G, 0), std::invalid_argument);
}

TEST(Space, LocalToGlobalCoversEveryDofWithExpectedMultiplicity) {
  for (bool periodic : {false, true}) {
    const auto mesh = square(3, periodic);
    for (auto kind : {SpaceKind::G, SpaceKind::C, SpaceKind::D, SpaceKind::S}) {
      const auto sp = build_space(mesh, kind, 3);
      std::vector<int> count(sp->dof_count(), 0);
      for (int e = 0; e < mesh->num_elements(); ++e)
        for (int d : sp->element_dofs(e)) ++count[d];
      for (int c : count) {
        EXPECT_GE(c, 1);
        EXPECT_LE(c, kind == SpaceKind::G ? 4 : (kind == SpaceKind::S ? 1 : 2));
      }
    }
  }
}

TEST(Incidence, Exactness) {
  for (bool periodic : {false, true}) {
    for (int n : {1, 2, 4}) {
      const auto mesh = square(3, periodic);
      const auto g = build_space(mesh, SpaceKind::G, n);
      const auto c = build_space(mesh, SpaceKind::C, n);
      const auto d = build_space(mesh, SpaceKind::D, n);
      const auto s = build_space(mesh, SpaceKind::S, n);
      const Eigen::SparseMatrix<int> rg = incidence(*c, *s).entries * incidence(*g, *c).entries;
      const Eigen::SparseMatrix<int> dp = incidence(*d, *s).entries * incidence(*g, *d).entries;
      EXPECT_EQ(Eigen::SparseMatrix<int>(rg.pruned()).nonZeros(), 0);
      EXPECT_EQ(Eigen::SparseMatrix<int>(dp.pruned()).nonZeros(), 0);
    }
  }
}

TEST(Incidence, EntriesAreSigns) {
  const auto mesh = square(2);
  const auto g = build_space(mesh, SpaceKind::G, 3);
  const auto c = build_space(mesh, SpaceKind::C, 3);
  const auto m = incidence(*g, *c).entries;
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<int>::InnerIterator it(m, k); it; ++it)
      EXPECT_TRUE(it.value() == 1 || it.value() == -1);
}

TEST(Incidence, UnsupportedPair) {
  const auto mesh = square(2);
  EXPECT_THROW(incidence(*build_space(mesh, SpaceKind::G, 2), *build_space(mesh, SpaceKind::S, 2)),
               std::invalid_argument);
  EXPECT_THROW(incidence(*build_space(mesh, SpaceKind::C, 2), *build_space(mesh, SpaceKind::D, 2)),
               std::invalid_argument);
}

TEST(Incidence, GradientOfLinearFunction) {
  const auto mesh = std::make_shared<const Mesh>(
      Bounds{0, 2, 0, 3}, 1, 1, std::array<Stretch, 2>{Stretch::uniform, Stretch::uniform},
      std::array<bool, 2>{false, false});
  const auto g = build_space(mesh, SpaceKind::G, 3);
  const auto c = build_space(mesh, SpaceKind::C, 3);
  const Field psi = project(g, ScalarFunction([](double x, double) { return x; }));
  const Field gradient(c, incidence(*g, *c).as_real() * psi.coeffs);
  for (double x : {0.1, 1.0, 1.9})
    for (double y : {0.0, 1.3, 2.7}) {
      const Vec2 v = evaluate_vector(gradient, x, y);
      EXPECT_NEAR(v[0], 1.0, 1e-13);
      EXPECT_NEAR(v[1], 0.0, 1e-13);
    }
}

TEST(Trace, NormalOfConstantVelocity) {
  const auto mesh = square(2);
  const auto d = build_space(mesh, SpaceKind::D, 3);
  const Field u = project(d, VectorFunction([](double, double) { return Vec2{1.0, 0.0}; }));
  const auto tr = trace_dofs(*d, "right", TraceKind::normal);
  ASSERT_EQ(tr.dofs.size(), 6u);
  for (std::size_t k = 0; k < tr.dofs.size(); ++k) {
    const double len = d->lattice_coordinate_y(k + 1) - d->lattice_coordinate_y(k);
    EXPECT_NEAR(tr.weights[k] * u.coeffs[tr.dofs[k]] / len, 1.0, 1e-13);
  }
  const auto left = trace_dofs(*d, "left", TraceKind::normal);
  EXPECT_NEAR(left.weights[0] * u.coeffs[left.dofs[0]] /
                  (d->lattice_coordinate_y(1) - d->lattice_coordinate_y(0)),
              -1.0, 1e-13);
}

TEST(Trace, TangentialOnTopIsCounterclockwise) {
  const auto mesh = square(2);
  const auto c = build_space(mesh, SpaceKind::C, 2);
  const Field h = project(c, VectorFunction([](double, double) { return Vec2{1.0, 0.0}; }));
  const auto tr = trace_dofs(*c, "top", TraceKind::tangential);
  ASSERT_EQ(tr.dofs.size(), 4u);
  for (std::size_t k = 0; k < tr.dofs.size(); ++k) {
    const double len = c->lattice_coordinate_x(k + 1) - c->lattice_coordinate_x(k);
    EXPECT_NEAR(tr.weights[k] * h.coeffs[tr.dofs[k]] / len, -1.0, 1e-13);
  }
}

TEST(Trace, ScalarOfConstant) {
  const auto mesh = square(3);
  const auto g = build_space(mesh, SpaceKind::G, 2);
  const Field f = project(g, ScalarFunction([](double, double) { return 5.0; }));
  for (const char* label : {"left", "right", "bottom", "top"}) {
    const auto tr = trace_dofs(*g, label, TraceKind::scalar);
    EXPECT_EQ(tr.dofs.size(), 7u);
    for (std::size_t k = 0; k < tr.dofs.size(); ++k) EXPECT_DOUBLE_EQ(tr.weights[k] * f.coeffs[tr.dofs[k]], 5.0);
  }
}

TEST(Trace, IncompatibleKind) {
  const auto mesh = square(2);
  EXPECT_THROW(trace_dofs(*build_space(mesh, SpaceKind::D, 2), "top", TraceKind::tangential),
               std::invalid_argument);
  EXPECT_THROW(trace_dofs(*build_space(mesh, SpaceKind::S, 2), "top", TraceKind::scalar),
               std::invalid_argument);
}

TEST(Project, ConstantVectorReproduced) {
  const auto mesh = stretched(3);
  for (auto kind : {SpaceKind::C, SpaceKind::D}) {
    const auto sp = build_space(mesh, kind, 3);
    const Field f = project(sp, VectorFunction([](double, double) { return Vec2{0.7, -1.3}; }));
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
      const Vec2 v = evaluate_vector(f, u(gen), u(gen));
      EXPECT_NEAR(v[0], 0.7, 1e-13);
      EXPECT_NEAR(v[1], -1.3, 1e-13);
    }
  }
}

TEST(Project, OrszagTangVelocityIsDivergenceFree) {
  const auto mesh = square(48, true, 2 * kPi);
  const auto d = build_space(mesh, SpaceKind::D, 4);
  const auto s = build_space(mesh, SpaceKind::S, 4);
  const Field u = project(
      d, VectorFunction([](double x, double y) { return Vec2{2 * std::cos(y), -2 * std::sin(x)}; }));
  const Eigen::VectorXd div = incidence(*d, *s).as_real() * u.coeffs;
  EXPECT_LE(div.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Project, NodalInterpolationConvergence) {
  const auto f = [](double x, double) { return std::sin(x); };
  const auto coarse = project(build_space(square(8, false, 2 * kPi), SpaceKind::G, 4), ScalarFunction(f));
  const auto fine = project(build_space(square(16, false, 2 * kPi), SpaceKind::G, 4), ScalarFunction(f));
  const double e1 = l2_error(coarse, f), e2 = l2_error(fine, f);
  EXPECT_LE(e1, 1e-4);
  const double ratio = e1 / e2;
  EXPECT_GT(ratio, 0.75 * 32.0);
  EXPECT_LT(ratio, 1.25 * 32.0);
}

TEST(Project, CommutingDiagram) {
  const auto psi = [](double x, double y) { return std::sin(2 * x + 0.3) * std::cos(1.7 * y); };
  const auto grad = [](double x, double y) {
    return Vec2{2 * std::cos(2 * x + 0.3) * std::cos(1.7 * y),
                -1.7 * std::sin(2 * x + 0.3) * std::sin(1.7 * y)};
  };
  const auto perp = [&](double x, double y) {
    const Vec2 g = grad(x, y);
    return Vec2{g[1], -g[0]};
  };
  const auto v = [](double x, double y) { return Vec2{std::sin(y) * x, std::cos(x * y)}; };
  const auto rotv = [](double x, double y) { return -y * std::sin(x * y) - x * std::cos(y); };
  const auto divv = [](double x, double y) { return std::sin(y) - x * std::sin(x * y); };
  for (auto mesh : {square(8), stretched(8)}) {
    const int n = 3;
    const auto g = build_space(mesh, SpaceKind::G, n);
    const auto c = build_space(mesh, SpaceKind::C, n);
    const auto d = build_space(mesh, SpaceKind::D, n);
    const auto s = build_space(mesh, SpaceKind::S, n);
    const Field pg = project(g, ScalarFunction(psi));
    EXPECT_LE((incidence(*g, *c).as_real() * pg.coeffs - project(c, VectorFunction(grad)).coeffs)
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
    EXPECT_LE((incidence(*g, *d).as_real() * pg.coeffs - project(d, VectorFunction(perp)).coeffs)
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
    EXPECT_LE((incidence(*c, *s).as_real() * project(c, VectorFunction(v)).coeffs -
               project(s, ScalarFunction(rotv)).coeffs)
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
    EXPECT_LE((incidence(*d, *s).as_real() * project(d, VectorFunction(v)).coeffs -
               project(s, ScalarFunction(divv)).coeffs)
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
  }
}

TEST(Project, PolynomialsInSpaceAreReproduced) {
  // x^2 y^3 lies in Q_3 and its derivatives in the C/D/S polynomial spaces.
  const auto mesh = stretched(2);
  const int n = 3;
  const auto g = build_space(mesh, SpaceKind::G, n);
  const Field f = project(g, ScalarFunction([](double x, double y) { return x * x * y * y * y; }));
  EXPECT_NEAR(evaluate_scalar(f, 0.37, 0.81), 0.37 * 0.37 * std::pow(0.81, 3), 1e-14);
  const auto s = build_space(mesh, SpaceKind::S, n);
  const Field q = project(s, ScalarFunction([](double x, double y) { return x * y * y; }));
  EXPECT_NEAR(evaluate_scalar(q, 0.2, 0.9), 0.2 * 0.81, 1e-13);
}

TEST(Field, RejectsWrongLength) {
  const auto sp = build_space(square(2), SpaceKind::S, 1);
  EXPECT_THROW(Field(sp, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}
