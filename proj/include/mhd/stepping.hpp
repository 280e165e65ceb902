#pragma once

/// @file stepping.hpp
/// @brief The decoupled leapfrog integrator, the coupled Crank-Nicolson
/// integrator and the run loop.

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mhd/assembly.hpp"
#include "mhd/problem.hpp"
#include "mhd/solvers.hpp"

namespace mhd {

enum class Scheme { decoupled, coupled_cn };

std::string_view scheme_name(Scheme scheme);
/// Accepts "decoupled" and "coupled-cn"; throws std::invalid_argument otherwise.
Scheme parse_scheme(std::string_view name);

struct StepperOptions {
  LinearSolveConfig linear;
  PicardConfig picard;
  /// Reuse the Maxwell factorization while u^k is unchanged from the previous step.
  bool freeze_maxwell_matrix = false;
};

struct StepReport {
  int picard_iterations = 0;
  double picard_update = 0.0;
  bool maxwell_refactorized = false;
};

/// Step failure tagged with the index of the step being computed.
class StepError : public std::runtime_error {
public:
  StepError(int step, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}
  int step() const { return step_; }

private:
  int step_;
};

struct FluidUpdate {
  Field u;
  Field omega;
  Field P;
};

class Integrator {
public:
  Integrator(DiscretizationPtr disc, PhysParams params, ProblemData data, Scheme scheme,
             StepperOptions options = {});

  const Discretization& disc() const { return *disc_; }
  const DiscretizationPtr& disc_ptr() const { return disc_; }
  const PhysParams& params() const { return params_; }
  const ProblemData& data() const { return data_; }
  Scheme scheme() const { return scheme_; }
  const StepperOptions& options() const { return options_; }
  const StepReport& last_report() const { return report_; }

  /// Step-0 state from initial u and H: omega^0 interpolated from the data's
  /// initial vorticity when given, else from the vorticity relation; P = 0, and for the leapfrog scheme H^{1/2} from a Crank-Nicolson half step.
  State initialize(const Field& u0, const Field& H0);
  /// Advances one step with the configured scheme.
  State step(const State& state);

  /// Vorticity in G that satisfies the weak vorticity relation for u at time t.
  Field initial_vorticity(const Field& u, double t) const;
  /// H at t^{1/2} from a coupled Crank-Nicolson step of length dt/2; the
  /// intermediate velocity is discarded.
  Field prestep_half(const State& state0);
  /// Leapfrog fluid step: u^k, omega^k, P^{k-1/2} from u^{k-1}, omega^{k-1}, H^{k-1/2}.
  FluidUpdate step1_fluid(const State& state);
  /// Leapfrog Maxwell step: H^{k+1/2} from H^{k-1/2} and u^k.
  Field step2_maxwell(const Field& H_prev, const Field& u_k, int k);
  /// Coupled Crank-Nicolson step of length @p dt with all fields at integer levels.
  State coupled_cn_step(const State& state, double dt);

private:
  DiscretizationPtr disc_;
  PhysParams params_;
  ProblemData data_;
  Scheme scheme_;
  StepperOptions options_;
  StepReport report_;
  LinearSolver maxwell_solver_;
  LinearSolver fluid_solver_;
  LinearSolver cn_solver_;
  Eigen::VectorXd maxwell_u_;
  SparseMatrix maxwell_matrix_;
};

struct RunOptions {
  /// Final time; ignored when steady is set.
  double t_end = 0.0;
  bool steady = false;
  double steady_tolerance = 1e-5;
  /// Upper bound on the number of steps of a steady run.
  int max_steps = 1000000;
};

/// Called with the state after every step (and once for step 0).
using StepObserver = std::function<void(const State&)>;

struct RunSummary {
  State final_state;
  int steps = 0;
  bool steady_reached = false;
  /// (1/dt) max(|u^k - u^{k-1}|, |H^+ - H^-|) at the last step.
  double last_increment = 0.0;
};

/// Number of steps of length dt covering [0, t_end].
int step_count(double t_end, double dt);

/// Runs from the initial fields until t_end or the steady criterion.
RunSummary run(Integrator& integrator, const Field& u0, const Field& H0, const RunOptions& options,
               const StepObserver& observer = {});

/// L2 norm of a field through its mass matrix.
double l2_norm(const Discretization& disc, const Field& field);

}  // namespace mhd
