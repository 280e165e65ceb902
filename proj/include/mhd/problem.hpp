#pragma once

/// @file problem.hpp
/// @brief Physical parameters, boundary/source data and the time-level state.

#include <cmath>
#include <functional>
#include <limits>

#include "mhd/derham.hpp"

namespace mhd {

using SpaceTimeScalar = std::function<double(double x, double y, double t)>;
using SpaceTimeVector = std::function<Vec2(double x, double y, double t)>;

/// Nondimensional numbers and the time step. Rf or Rm equal to +infinity
/// selects the ideal limit, in which the dissipation term is dropped.
struct PhysParams {
  double Rf = std::numeric_limits<double>::infinity();
  double Rm = std::numeric_limits<double>::infinity();
  double c = 1.0;
  double dt = 0.01;

  bool ideal_fluid() const { return std::isinf(Rf); }
  bool ideal_magnetic() const { return std::isinf(Rm); }
  double inv_Rf() const { return ideal_fluid() ? 0.0 : 1.0 / Rf; }
  double inv_Rm() const { return ideal_magnetic() ? 0.0 : 1.0 / Rm; }
  /// Alternative coupling number s = c Rm.
  double s() const { return c * Rm; }
  /// Throws std::invalid_argument unless every entry is positive (Rf, Rm may be +inf).
  void validate() const;
};

/// Boundary data, body force and Ohm-law source. Empty functions mean zero.
/// Vector data on a boundary side is reduced to its outward normal or
/// counterclockwise tangential component as each condition requires.
struct ProblemData {
  BoundaryPartition partition;
  SpaceTimeScalar pressure;   ///< total pressure on gamma_P
  SpaceTimeVector velocity;   ///< normal part on gamma_u_normal, tangential part on gamma_u_tangential
  SpaceTimeScalar vorticity;  ///< on gamma_omega
  SpaceTimeScalar electric;   ///< on gamma_E
  SpaceTimeVector magnetic;   ///< tangential part on gamma_H
  SpaceTimeVector forcing;    ///< momentum source f
  SpaceTimeScalar ohm_source; ///< source e added to Ohm's law
  /// Exact vorticity at t = 0; when empty, omega^0 is the weak rot of u^0.
  ScalarFunction initial_vorticity;
};

/// Unknowns at one step of either integrator. u and omega sit at t^k, P at
/// t^{k-1/2}; H sits at t^{k+1/2} for the leapfrog scheme and at t^k for the
/// coupled Crank-Nicolson scheme.
struct State {
  Field u;
  Field omega;
  Field P;
  Field H;
  int k = 0;
  double t = 0.0;
};

}  // namespace mhd
