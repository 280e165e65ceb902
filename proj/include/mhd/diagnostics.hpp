#pragma once

/// @file diagnostics.hpp
/// @brief Energies, the discrete energy budget, divergence monitors and
/// stream functions.

#include <vector>

#include "mhd/stepping.hpp"

namespace mhd {

/// One row of the per-step log. Energy-like entries carry the time levels of
/// the scheme that produced them: for the leapfrog scheme M_minus/M_plus are
/// M at t^{k-1/2} and t^{k+1/2}; for Crank-Nicolson they are M at t^{k-1} and t^k.
struct DiagnosticsRecord {
  int k = 0;
  double t = 0.0;
  double K = 0.0;
  double M_minus = 0.0;
  double M_plus = 0.0;
  double Mtilde = 0.0;
  double Etilde = 0.0;
  double S = 0.0;
  double J = 0.0;
  double Jtilde = 0.0;
  double A = 0.0;
  double Atilde = 0.0;
  /// Coupling work a(j, H, u) with every field at the integer level k.
  double A_k = 0.0;
  double F = 0.0;
  double budget_residual = 0.0;
  /// False where the budget has no preceding record to close against
  /// (step 0, and step 1 of the leapfrog scheme).
  bool budget_defined = false;
  double div_u_L2 = 0.0;
  double div_H_L2 = 0.0;
  double div_H_max_element = 0.0;
  double weak_divH_max = 0.0;
  /// max over q of the change of the weak Gauss functional since step 0.
  double weak_divH_drift = 0.0;
};

double kinetic_energy(const Discretization& disc, const Field& u);
/// c/2 <H, H>.
double magnetic_energy(const Discretization& disc, const Field& H, double c);

/// (E^k - E^{k-1})/dt - [F - S/Rf - c J~/Rm + c (A - A~)] with all rate terms
/// taken from @p current. Throws std::invalid_argument unless current.k == previous.k + 1.
double budget_residual(const DiagnosticsRecord& current, const DiagnosticsRecord& previous,
                       const PhysParams& params);

/// L2 norm of the S-field E_div u.
double divergence_u_l2(const Discretization& disc, const Field& u);

struct ElementDivergence {
  /// sqrt of the sum over elements of squared elementwise L2 norms.
  double l2 = 0.0;
  /// Largest elementwise L2 norm.
  double max_element = 0.0;
};
/// Exact divergence of a C-field inside each element, integrated with Gauss points.
ElementDivergence divergence_h_elementwise(const Discretization& disc, const Field& H);

/// Largest pointwise magnitude of a field over an equispaced lattice of
/// points x points per element, element boundaries included.
double max_abs_sampled(const Field& field, int points);

/// <H . n, q_i> over the labelled sides for every G basis function q_i.
Eigen::VectorXd normal_trace_pairing(const Discretization& disc, const Field& H,
                                     const std::set<std::string>& labels);

/// Tracks <H, grad q> minus its accumulated boundary work for every q in G
/// vanishing on gamma_H. The tracked vector is constant in exact arithmetic.
class WeakGaussMonitor {
public:
  WeakGaussMonitor(DiscretizationPtr disc, PhysParams params, ProblemData data, Scheme scheme);
  /// Sets the reference from H^0 and the H held by the step-0 state.
  void start(const Field& H0, const State& state0);
  /// Accounts for one step and returns the current functional vector.
  Eigen::VectorXd advance(const State& state);
  Eigen::VectorXd functional(const Field& H) const;
  const Eigen::VectorXd& reference() const { return reference_; }
  const std::vector<char>& interior_mask() const { return mask_; }

private:
  Eigen::VectorXd boundary_work(double t) const;
  Eigen::VectorXd restrict(const Eigen::VectorXd& v) const;

  DiscretizationPtr disc_;
  PhysParams params_;
  ProblemData data_;
  Scheme scheme_;
  std::vector<char> mask_;
  Eigen::VectorXd accumulated_;
  Eigen::VectorXd reference_;
};

/// Produces one DiagnosticsRecord per state of a run.
class DiagnosticsTracker {
public:
  DiagnosticsTracker(DiscretizationPtr disc, PhysParams params, ProblemData data, Scheme scheme);
  /// Record for step 0; @p H0 is the initial magnetic field at t = 0.
  const DiagnosticsRecord& start(const State& state0, const Field& H0);
  const DiagnosticsRecord& advance(const State& state);
  const std::vector<DiagnosticsRecord>& records() const { return records_; }

private:
  void fill_monitors(DiagnosticsRecord& r, const State& s, const Eigen::VectorXd& weak) const;

  DiscretizationPtr disc_;
  PhysParams params_;
  ProblemData data_;
  Scheme scheme_;
  WeakGaussMonitor gauss_;
  State previous_;
  std::vector<DiagnosticsRecord> records_;
};

/// Stream function psi on the G lattice with psi = 0 at the bottom-left
/// corner and field = (d psi/dy, -d psi/dx). D-fields are integrated exactly
/// from their fluxes; C-fields by Gauss quadrature along lattice edges. The
/// result averages the x-then-y and y-then-x integration paths.
Field stream_function(const Discretization& disc, const Field& field);

}  // namespace mhd
