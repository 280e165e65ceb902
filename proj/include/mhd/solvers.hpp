#pragma once

/// @file solvers.hpp
/// @brief Sparse linear solves and the Picard loop for nonlinear steps.

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>

namespace mhd {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class LinearMethod { direct, iterative };

struct LinearSolveConfig {
  LinearMethod method = LinearMethod::direct;
  /// Bound on ||b - A x|| / ||b||.
  double tolerance = 1e-12;
  int max_iterations = 2000;
  /// Iterative-refinement sweeps after a direct solve.
  int refinement_steps = 3;
  /// Krylov iterations allowed in solve_recycled before refactorizing; 0
  /// refactorizes on every call.
  int recycle_iterations = 40;

  /// Throws std::invalid_argument unless tolerance lies in (0, 1e-4] and max_iterations >= 1.
  void validate() const;
};

struct SolveStats {
  double relative_residual = 0.0;
  int iterations = 0;
  std::vector<double> residual_history;
};

class SolveError : public std::runtime_error {
public:
  SolveError(const std::string& what, SolveStats stats)
      : std::runtime_error(what), stats_(std::move(stats)) {}
  const SolveStats& stats() const { return stats_; }

private:
  SolveStats stats_;
};

/// Factorizes once and solves for many right-hand sides.
class LinearSolver {
public:
  explicit LinearSolver(LinearSolveConfig config = {});
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  /// Throws SolveError when the matrix is structurally or numerically singular.
  void factorize(const SparseMatrix& matrix);
  bool ready() const;
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs, SolveStats* stats = nullptr) const;
  /// Solves with @p matrix, preconditioning BiCGSTAB by the held direct
  /// factorization of an earlier matrix of the same pattern. Falls back to
  /// factorizing @p matrix when that misses the tolerance; returns true then.
  /// A correctly sized @p x is the Krylov starting guess.
  bool solve_recycled(const SparseMatrix& matrix, const Eigen::VectorXd& rhs, Eigen::VectorXd& x,
                      SolveStats* stats = nullptr);

private:
  struct Impl;
  LinearSolveConfig config_;
  std::unique_ptr<Impl> impl_;
};

Eigen::VectorXd solve_linear(const SparseMatrix& matrix, const Eigen::VectorXd& rhs,
                             const LinearSolveConfig& config = {}, SolveStats* stats = nullptr);

struct PicardConfig {
  /// Bound on the relative update of the monitored unknown.
  double tolerance = 1e-10;
  int max_iterations = 30;
  /// Under-relaxation factor in (0, 1].
  double relaxation = 1.0;

  void validate() const;
};

struct LinearSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
};

class PicardError : public std::runtime_error {
public:
  PicardError(const std::string& what, int iterations, double last_update)
      : std::runtime_error(what), iterations_(iterations), last_update_(last_update) {}
  int iterations() const { return iterations_; }
  double last_update() const { return last_update_; }

private:
  int iterations_;
  double last_update_;
};

struct PicardResult {
  Eigen::VectorXd solution;
  int iterations = 0;
  double last_update = 0.0;
};

/// Fixed-point iteration x_s = solve(build(x_{s-1})). @p update_norm returns
/// the relative change between consecutive iterates used as the stopping test.
PicardResult picard_iterate(
    const std::function<LinearSystem(const Eigen::VectorXd&)>& step_builder,
    Eigen::VectorXd initial_guess, const PicardConfig& config,
    const LinearSolveConfig& linear,
    const std::function<double(const Eigen::VectorXd& current, const Eigen::VectorXd& previous)>&
        update_norm);

/// As above, solving every iterate through @p solver.solve_recycled so that a
/// factorization carries across iterations and calls.
PicardResult picard_iterate(
    const std::function<LinearSystem(const Eigen::VectorXd&)>& step_builder,
    Eigen::VectorXd initial_guess, const PicardConfig& config, LinearSolver& solver,
    const std::function<double(const Eigen::VectorXd& current, const Eigen::VectorXd& previous)>&
        update_norm);

}  // namespace mhd
