#include "mhd/solvers.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#ifdef MHD_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

namespace mhd {

void LinearSolveConfig::validate() const {
  if (!(tolerance > 0.0 && tolerance <= 1e-4)) {
    throw std::invalid_argument("linear solver: tolerance must lie in (0, 1e-4]");
  }
  if (max_iterations < 1) throw std::invalid_argument("linear solver: max_iterations must be >= 1");
  if (refinement_steps < 0) throw std::invalid_argument("linear solver: negative refinement steps");
  if (recycle_iterations < 0) {
    throw std::invalid_argument("linear solver: negative recycle iterations");
  }
}

void PicardConfig::validate() const {
  if (!(tolerance > 0.0)) throw std::invalid_argument("picard: tolerance must be positive");
  if (max_iterations < 1) throw std::invalid_argument("picard: max_iterations must be >= 1");
  if (!(relaxation > 0.0 && relaxation <= 1.0)) {
    throw std::invalid_argument("picard: relaxation must lie in (0, 1]");
  }
}

#ifdef MHD_HAVE_UMFPACK
using DirectLU = Eigen::UmfPackLU<SparseMatrix>;
#else
using DirectLU = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;
#endif

namespace {

// Preconditioner interface expected by Eigen's Krylov solvers, applying a
// factorization computed for a different matrix.
class HeldLU {
public:
  void set(const DirectLU* lu) { lu_ = lu; }
  template <typename M>
  HeldLU& analyzePattern(const M&) { return *this; }
  template <typename M>
  HeldLU& factorize(const M&) { return *this; }
  template <typename M>
  HeldLU& compute(const M&) { return *this; }
  template <typename Rhs>
  Eigen::VectorXd solve(const Rhs& b) const { return lu_->solve(Eigen::VectorXd(b)); }
  Eigen::ComputationInfo info() const { return Eigen::Success; }

private:
  const DirectLU* lu_ = nullptr;
};

}  // namespace

struct LinearSolver::Impl {
  SparseMatrix matrix;
  DirectLU lu;
  Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>> krylov;
  bool ready = false;
};

LinearSolver::LinearSolver(LinearSolveConfig config)
    : config_(config), impl_(std::make_unique<Impl>()) {
  config_.validate();
}

LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

bool LinearSolver::ready() const { return impl_->ready; }

void LinearSolver::factorize(const SparseMatrix& matrix) {
  if (matrix.rows() != matrix.cols()) {
    throw std::invalid_argument("linear solver: matrix is not square");
  }
  impl_->matrix = matrix;
  impl_->matrix.makeCompressed();
  impl_->ready = false;
  if (config_.method == LinearMethod::direct) {
#ifdef MHD_HAVE_UMFPACK
    // Refinement is done here against the residual tolerance instead.
    impl_->lu.umfpackControl()(UMFPACK_IRSTEP) = 0;
#endif
    impl_->lu.compute(impl_->matrix);
    if (impl_->lu.info() != Eigen::Success) {
      throw SolveError("linear solver: factorization failed (singular matrix)", {});
    }
  } else {
    impl_->krylov.setTolerance(config_.tolerance);
    impl_->krylov.compute(impl_->matrix);
    if (impl_->krylov.info() != Eigen::Success) {
      throw SolveError("linear solver: preconditioner setup failed", {});
    }
  }
  impl_->ready = true;
}

Eigen::VectorXd LinearSolver::solve(const Eigen::VectorXd& rhs, SolveStats* stats) const {
  if (!impl_->ready) throw std::logic_error("linear solver: solve before factorize");
  if (rhs.size() != impl_->matrix.rows()) {
    throw std::invalid_argument("linear solver: rhs size mismatch");
  }
  SolveStats local;
  const double bnorm = rhs.norm();
  Eigen::VectorXd x;
  if (bnorm == 0.0) {
    x = Eigen::VectorXd::Zero(rhs.size());
    if (stats) *stats = local;
    return x;
  }
  auto residual = [&](const Eigen::VectorXd& v) { return (rhs - impl_->matrix * v).norm() / bnorm; };
  if (config_.method == LinearMethod::direct) {
    x = impl_->lu.solve(rhs);
    double r = residual(x);
    local.residual_history.push_back(r);
    for (int s = 0; s < config_.refinement_steps && r > 0.01 * config_.tolerance; ++s) {
      const Eigen::VectorXd r_vec = rhs - impl_->matrix * x;
      const Eigen::VectorXd dx = impl_->lu.solve(r_vec);
      const Eigen::VectorXd trial = x + dx;
      const double rt = residual(trial);
      local.residual_history.push_back(rt);
      if (!(rt < r)) break;
      x = trial;
      r = rt;
    }
    local.relative_residual = r;
    local.iterations = static_cast<int>(local.residual_history.size());
  } else {
    auto& k = impl_->krylov;
    x = Eigen::VectorXd::Zero(rhs.size());
    const int chunk = 25;
    int done = 0;
    double r = 1.0;
    while (done < config_.max_iterations) {
      k.setMaxIterations(std::min(chunk, config_.max_iterations - done));
      x = k.solveWithGuess(rhs, x);
      done += static_cast<int>(k.iterations());
      r = residual(x);
      local.residual_history.push_back(r);
      if (r <= config_.tolerance || k.iterations() == 0) break;
    }
    local.relative_residual = r;
    local.iterations = done;
  }
  if (!std::isfinite(local.relative_residual) || local.relative_residual > config_.tolerance) {
    std::ostringstream msg;
    msg << "linear solver: relative residual " << local.relative_residual
        << " exceeds tolerance " << config_.tolerance;
    throw SolveError(msg.str(), local);
  }
  if (stats) *stats = local;
  return x;
}

bool LinearSolver::solve_recycled(const SparseMatrix& matrix, const Eigen::VectorXd& rhs,
                                  Eigen::VectorXd& x, SolveStats* stats) {
  if (config_.method == LinearMethod::direct && impl_->ready && config_.recycle_iterations > 0 &&
      matrix.rows() == impl_->matrix.rows() && matrix.cols() == impl_->matrix.cols()) {
    const double bnorm = rhs.norm();
    if (bnorm == 0.0) {
      x = Eigen::VectorXd::Zero(rhs.size());
      if (stats) *stats = {};
      return false;
    }
    Eigen::BiCGSTAB<SparseMatrix, HeldLU> krylov;
    krylov.preconditioner().set(&impl_->lu);
    krylov.compute(matrix);
    krylov.setTolerance(0.5 * config_.tolerance);
    krylov.setMaxIterations(config_.recycle_iterations);
    const Eigen::VectorXd guess = x.size() == rhs.size() ? x : Eigen::VectorXd(impl_->lu.solve(rhs));
    const Eigen::VectorXd trial = krylov.solveWithGuess(rhs, guess);
    const double r = (rhs - matrix * trial).norm() / bnorm;
    if (std::isfinite(r) && r <= config_.tolerance) {
      x = trial;
      if (stats) *stats = SolveStats{r, static_cast<int>(krylov.iterations()), {r}};
      return false;
    }
  }
  factorize(matrix);
  x = solve(rhs, stats);
  return true;
}

Eigen::VectorXd solve_linear(const SparseMatrix& matrix, const Eigen::VectorXd& rhs,
                             const LinearSolveConfig& config, SolveStats* stats) {
  LinearSolver solver(config);
  solver.factorize(matrix);
  return solver.solve(rhs, stats);
}

PicardResult picard_iterate(
    const std::function<LinearSystem(const Eigen::VectorXd&)>& step_builder,
    Eigen::VectorXd initial_guess, const PicardConfig& config, const LinearSolveConfig& linear,
    const std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>& update_norm) {
  LinearSolveConfig fresh = linear;
  fresh.recycle_iterations = 0;
  LinearSolver solver(fresh);
  return picard_iterate(step_builder, std::move(initial_guess), config, solver, update_norm);
}

PicardResult picard_iterate(
    const std::function<LinearSystem(const Eigen::VectorXd&)>& step_builder,
    Eigen::VectorXd initial_guess, const PicardConfig& config, LinearSolver& solver,
    const std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>& update_norm) {
  config.validate();
  PicardResult result;
  Eigen::VectorXd previous = std::move(initial_guess);
  double update = 0.0;
  for (int s = 1; s <= config.max_iterations; ++s) {
    const LinearSystem system = step_builder(previous);
    Eigen::VectorXd next = previous;
    solver.solve_recycled(system.matrix, system.rhs, next);
    if (config.relaxation < 1.0) {
      next = config.relaxation * next + (1.0 - config.relaxation) * previous;
    }
    update = update_norm(next, previous);
    previous = std::move(next);
    if (!std::isfinite(update)) break;
    if (update <= config.tolerance) {
      result.solution = std::move(previous);
      result.iterations = s;
      result.last_update = update;
      return result;
    }
  }
  std::ostringstream msg;
  msg << "picard: no convergence after " << config.max_iterations
      << " iterations (last relative update " << update << ")";
  throw PicardError(msg.str(), config.max_iterations, update);
}

}  // namespace mhd
