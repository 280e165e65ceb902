#pragma once

/// @file cases.hpp
/// @brief Manufactured solutions, the named experiment set-ups and the
/// convergence-sweep harness.

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mhd/expr.hpp"
#include "mhd/stepping.hpp"

namespace mhd {

/// Closed-form 2D solution with the sources that make it exact:
///   du/dt + omega x u + curl(omega)/Rf - c j x H + grad P = f,
///   omega = rot u,  div u = 0,  dH/dt + perp-grad E = 0,  j = rot H,
///   E = j/Rm - u x H - e.
/// Vectors are pairs of expressions; scalar cross products are out of plane.
struct ManufacturedSolution {
  Expr ux, uy, omega, P, Hx, Hy, E, j;
  Expr fx, fy, e;
  double Rf = 1.0, Rm = 1.0, c = 1.0;

  SpaceTimeVector u_fn() const;
  SpaceTimeVector H_fn() const;
  SpaceTimeVector f_fn() const;
};

/// u = (cos x sin y, -sin x cos y) e^t, P = cos x cos y e^-t,
/// E = cos x sin(y/2) e^t, H = -(e^t - 1) perp-grad(cos x sin(y/2)).
ManufacturedSolution mms_build(double Rf, double Rm, double c);

/// Side length of the manufactured-solution domain.
inline constexpr double kMmsLength = 1.0;

struct CaseSpec {
  std::string name;
  Bounds bounds;
  int kx = 1, ky = 1;
  std::array<Stretch, 2> stretch{Stretch::uniform, Stretch::uniform};
  std::array<bool, 2> periodic{false, false};
  int degree = 1;
  PhysParams params;
  ProblemData data;
  VectorFunction u0;
  VectorFunction H0;
  double t_end = 1.0;
  bool steady = false;
  double steady_tolerance = 1e-5;
  std::optional<ManufacturedSolution> mms;

  std::shared_ptr<const Mesh> build_mesh() const;
};

/// Mixed boundary conditions on [0, L]^2 exercising every boundary pathway.
CaseSpec mms_case(int degree, int k, double dt, double t_end, double Rf = 1.0, double Rm = 1.0,
                  double c = 1.0, double length = kMmsLength);
/// Unit square, natural zero data everywhere; Rf = Rm = infinity unless given.
CaseSpec conservation_case(int degree, int k, double dt, double t_end,
                           double Rf = std::numeric_limits<double>::infinity(),
                           double Rm = std::numeric_limits<double>::infinity(), double c = 1.0);
/// Periodic [0, 2 pi]^2 with psi = 2 sin y - 2 cos x and A = cos 2y - 2 cos x.
CaseSpec orszag_tang_case(int degree = 4, int k = 48, double dt = 1.0 / 200.0,
                          double t_end = 1.0, double Rf = 100.0, double Rm = 100.0,
                          double c = 1.0);
/// Unit square with a sliding lid and H^0 = (0, 1); a non-positive c selects c = 1/Rm.
CaseSpec lid_driven_cavity_case(int degree = 3, int k = 32, double dt = 1.0 / 1000.0,
                                double steady_tolerance = 1e-5, double Rf = 400.0,
                                double Rm = 400.0, double c = 0.0);

/// Optional replacements of case defaults.
struct CaseOverrides {
  std::optional<int> degree;
  std::optional<int> kx, ky;
  std::optional<double> dt, t_end;
  std::optional<bool> steady;
  std::optional<double> steady_tolerance;
  std::optional<double> Rf, Rm, c;
};
/// Set-up for a name in {mms, conservation, orszag-tang, cavity}; throws
/// std::invalid_argument for other names.
CaseSpec make_case(std::string_view name, const CaseOverrides& overrides = {});
const std::vector<std::string>& case_names();

/// Errors of a state against a manufactured solution, each field compared
/// at the time of its own tag (times tag.value() * dt).
struct ErrorNorms {
  double u_l2 = 0.0;
  double u_hdiv = 0.0;
  double omega_l2 = 0.0;
  double omega_h1 = 0.0;
  double P_l2 = 0.0;
  double H_l2 = 0.0;
  double H_hcurl = 0.0;
};
ErrorNorms mms_errors(const Discretization& disc, const State& state,
                      const ManufacturedSolution& mms, double dt);

/// Least-squares slope of log(y) against log(x).
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

struct SweepRow {
  double parameter = 0.0;  ///< dt (temporal) or h = domain width / K (spatial)
  int k = 0;
  double dt = 0.0;
  ErrorNorms errors;
};
struct SweepResult {
  std::vector<SweepRow> rows;
  double rate_u = 0.0;
  double rate_omega = 0.0;
  double rate_P = 0.0;
  double rate_H = 0.0;
};

struct SweepOptions {
  Scheme scheme = Scheme::decoupled;
  double t_end = 1.0;
  double length = kMmsLength;
  StepperOptions stepper;
  AssemblyOptions assembly;
};
/// Fixed mesh, varying dt.
SweepResult temporal_sweep(int degree, int k, const std::vector<double>& dts,
                           const SweepOptions& options);
/// Fixed dt, varying K.
SweepResult spatial_sweep(int degree, const std::vector<int>& ks, double dt,
                          const SweepOptions& options);

/// Runs one manufactured-solution simulation and returns its final errors.
ErrorNorms mms_run(int degree, int k, double dt, const SweepOptions& options);

struct CenterlineRow {
  double x = 0.0, y = 0.0;
  double u = 0.0, v = 0.0, omega = 0.0, Hx = 0.0, Hy = 0.0;
};
/// Stations used by the cavity benchmark tables.
const std::vector<double>& centerline_stations();
/// Point values along y = 0.5 (x_direction = true) or x = 0.5.
std::vector<CenterlineRow> centerline_extract(const State& state, bool x_direction);

}  // namespace mhd
