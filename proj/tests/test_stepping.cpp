#include <gtest/gtest.h>

#include <cmath>

#include "mhd/cases.hpp"
#include "mhd/diagnostics.hpp"

using namespace mhd;

namespace {

struct Problem {
  CaseSpec spec;
  DiscretizationPtr disc;
  Field u0, H0;
};

Problem conservation(double Rf, double Rm, int degree = 2, int k = 4) {
  Problem s;
  s.spec = conservation_case(degree, k, 1.0 / 50.0, 0.2, Rf, Rm);
  s.disc = build_discretization(s.spec.build_mesh(), degree);
  s.u0 = project(s.disc->D, s.spec.u0);
  s.H0 = project(s.disc->C, s.spec.H0);
  return s;
}

double max_abs(const Field& f) { return f.coeffs.cwiseAbs().maxCoeff(); }

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST(Scheme, NamesRoundTrip) {
  for (Scheme s : {Scheme::decoupled, Scheme::coupled_cn}) {
    EXPECT_EQ(parse_scheme(scheme_name(s)), s);
  }
  EXPECT_THROW(parse_scheme("leapfrog"), std::invalid_argument);
}

TEST(StepCount, CoversInterval) {
  EXPECT_EQ(step_count(1.0, 1.0 / 200.0), 200);
  EXPECT_EQ(step_count(0.3, 0.1), 3);
  EXPECT_EQ(step_count(0.35, 0.1), 4);
  EXPECT_EQ(step_count(0.0, 0.1), 0);
  EXPECT_THROW(step_count(1.0, 0.0), std::invalid_argument);
}

TEST(Integrator, ZeroStateStaysZero) {
  for (Scheme scheme : {Scheme::decoupled, Scheme::coupled_cn}) {
    Problem s = conservation(100.0, 100.0);
    Integrator integ(s.disc, s.spec.params, s.spec.data, scheme);
    State st = integ.initialize(Field(s.disc->D), Field(s.disc->C));
    for (int i = 0; i < 3; ++i) st = integ.step(st);
    EXPECT_EQ(st.k, 3);
    EXPECT_LE(max_abs(st.u), 1e-14);
    EXPECT_LE(max_abs(st.omega), 1e-14);
    EXPECT_LE(max_abs(st.P), 1e-14);
    EXPECT_LE(max_abs(st.H), 1e-14);
  }
}

TEST(Integrator, TimeTagsOfLeapfrogStates) {
  Problem s = conservation(100.0, 100.0);
  Integrator integ(s.disc, s.spec.params, s.spec.data, Scheme::decoupled);
  State st = integ.initialize(s.u0, s.H0);
  EXPECT_EQ(st.u.tag, TimeTag::integer(0));
  EXPECT_EQ(st.P.tag, TimeTag{-1});
  EXPECT_EQ(st.H.tag, TimeTag::half_after(0));
  st = integ.step(st);
  EXPECT_EQ(st.u.tag, TimeTag::integer(1));
  EXPECT_EQ(st.omega.tag, TimeTag::integer(1));
  EXPECT_EQ(st.P.tag, TimeTag::half_after(0));
  EXPECT_EQ(st.H.tag, TimeTag::half_after(1));
  EXPECT_DOUBLE_EQ(st.t, 1.0 / 50.0);
}

TEST(Integrator, TimeTagsOfCrankNicolsonStates) {
  Problem s = conservation(100.0, 100.0);
  Integrator integ(s.disc, s.spec.params, s.spec.data, Scheme::coupled_cn);
  State st = integ.step(integ.initialize(s.u0, s.H0));
  EXPECT_EQ(st.u.tag, TimeTag::integer(1));
  EXPECT_EQ(st.H.tag, TimeTag::integer(1));
  EXPECT_EQ(st.P.tag, TimeTag::half_after(0));
}

TEST(Integrator, VelocityStaysDivergenceFree) {
  for (Scheme scheme : {Scheme::decoupled, Scheme::coupled_cn}) {
    Problem s = conservation(100.0, 100.0);
    Integrator integ(s.disc, s.spec.params, s.spec.data, scheme);
    State st = integ.initialize(s.u0, s.H0);
    for (int i = 0; i < 5; ++i) {
      st = integ.step(st);
      EXPECT_LE(divergence_u_l2(*s.disc, st.u), 1e-12);
    }
  }
}

TEST(Integrator, CrankNicolsonConservesIdealEnergy) {
  Problem s = conservation(kInf, kInf);
  Integrator integ(s.disc, s.spec.params, s.spec.data, Scheme::coupled_cn);
  State st = integ.initialize(s.u0, s.H0);
  const double c = s.spec.params.c;
  const double e0 = kinetic_energy(*s.disc, st.u) + magnetic_energy(*s.disc, st.H, c);
  for (int i = 0; i < 10; ++i) {
    st = integ.step(st);
    const double e = kinetic_energy(*s.disc, st.u) + magnetic_energy(*s.disc, st.H, c);
    EXPECT_LE(std::abs(e - e0) / e0, 1e-12);
  }
}

TEST(Integrator, LeapfrogBudgetCloses) {
  Problem s = conservation(100.0, 100.0);
  Integrator integ(s.disc, s.spec.params, s.spec.data, Scheme::decoupled);
  DiagnosticsTracker tracker(s.disc, s.spec.params, s.spec.data, Scheme::decoupled);
  RunOptions ro;
  ro.t_end = 0.2;
  int checked = 0;
  run(integ, s.u0, s.H0, ro, [&](const State& st) {
    const DiagnosticsRecord& r = st.k == 0 ? tracker.start(st, s.H0) : tracker.advance(st);
    EXPECT_EQ(r.budget_defined, st.k >= 2);
    if (r.budget_defined) {
      EXPECT_LE(std::abs(r.budget_residual), 1e-10 * std::max(1.0, r.Etilde));
      ++checked;
    }
  });
  EXPECT_EQ(checked, 9);
}

TEST(Integrator, PicardFailureBecomesStepError) {
  Problem s = conservation(100.0, 100.0);
  StepperOptions o;
  o.picard.max_iterations = 1;
  o.picard.tolerance = 1e-15;
  Integrator integ(s.disc, s.spec.params, s.spec.data, Scheme::coupled_cn, o);
  const State st = integ.initialize(s.u0, s.H0);
  try {
    integ.step(st);
    FAIL() << "expected StepError";
  } catch (const StepError& e) {
    EXPECT_EQ(e.step(), 1);
  }
}

TEST(Run, ZeroFinalTimeReturnsInitialState) {
  Problem s = conservation(100.0, 100.0);
  Integrator integ(s.disc, s.spec.params, s.spec.data, Scheme::decoupled);
  RunOptions ro;
  ro.t_end = 0.0;
  int calls = 0;
  const RunSummary r = run(integ, s.u0, s.H0, ro, [&](const State&) { ++calls; });
  EXPECT_EQ(r.steps, 0);
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(r.final_state.k, 0);
  EXPECT_EQ((r.final_state.u.coeffs - s.u0.coeffs).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Run, ObserverSeesEveryStep) {
  Problem s = conservation(100.0, 100.0, 1, 3);
  Integrator integ(s.disc, s.spec.params, s.spec.data, Scheme::decoupled);
  RunOptions ro;
  ro.t_end = 0.1;
  std::vector<int> seen;
  const RunSummary r = run(integ, s.u0, s.H0, ro, [&](const State& st) { seen.push_back(st.k); });
  EXPECT_EQ(r.steps, 5);
  EXPECT_EQ(seen, (std::vector<int>{0, 1, 2, 3, 4, 5}));
  EXPECT_NEAR(r.final_state.t, 0.1, 1e-15);
}

TEST(Run, SteadyStopsForRestingState) {
  Problem s = conservation(100.0, 100.0, 1, 3);
  Integrator integ(s.disc, s.spec.params, s.spec.data, Scheme::decoupled);
  RunOptions ro;
  ro.steady = true;
  ro.max_steps = 50;
  const RunSummary r = run(integ, Field(s.disc->D), Field(s.disc->C), ro);
  EXPECT_TRUE(r.steady_reached);
  EXPECT_EQ(r.steps, 1);
  EXPECT_EQ(r.last_increment, 0.0);
}

TEST(Run, ManufacturedSolutionIsTracked) {
  SweepOptions o;
  o.t_end = 0.1;
  const ErrorNorms e = mms_run(3, 4, 0.05, o);
  EXPECT_LE(e.u_l2, 1e-3);
  EXPECT_LE(e.H_l2, 1e-3);
  EXPECT_LE(e.P_l2, 1e-2);
}
