#include "mhd/stepping.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace mhd {

void PhysParams::validate() const {
  auto positive = [](double v) { return v > 0.0 && !std::isnan(v); };
  if (!positive(Rf)) throw std::invalid_argument("parameters: Rf must be positive");
  if (!positive(Rm)) throw std::invalid_argument("parameters: Rm must be positive");
  if (!positive(c) || std::isinf(c)) throw std::invalid_argument("parameters: c must be positive");
  if (!positive(dt) || std::isinf(dt)) throw std::invalid_argument("parameters: dt must be positive");
}

std::string_view scheme_name(Scheme scheme) {
  return scheme == Scheme::decoupled ? "decoupled" : "coupled-cn";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "decoupled") return Scheme::decoupled;
  if (name == "coupled-cn") return Scheme::coupled_cn;
  throw std::invalid_argument("unknown scheme '" + std::string(name) +
                              "' (expected decoupled or coupled-cn)");
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void add_block(Triplets& t, const SparseMatrix& m, int row0, int col0, double scale = 1.0) {
  if (scale == 0.0) return;
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      t.emplace_back(row0 + static_cast<int>(it.row()), col0 + static_cast<int>(it.col()),
                     scale * it.value());
    }
  }
}

SparseMatrix build(const Triplets& t, int n) {
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

ScalarFunction at_time(const SpaceTimeScalar& f, double t) {
  if (!f) return {};
  return [f, t](double x, double y) { return f(x, y, t); };
}

VectorFunction at_time(const SpaceTimeVector& f, double t) {
  if (!f) return {};
  return [f, t](double x, double y) { return f(x, y, t); };
}

ScalarFunction side_component(const SpaceTimeVector& f, Side side, TraceKind kind, double t) {
  if (!f) return {};
  const Vec2 d = kind == TraceKind::normal ? side_normal(side) : side_tangent(side);
  return [f, t, d](double x, double y) {
    const Vec2 v = f(x, y, t);
    return v[0] * d[0] + v[1] * d[1];
  };
}

EssentialConstraint vector_essential(const FunctionSpace& space,
                                     const std::set<std::string>& labels,
                                     const SpaceTimeVector& f, TraceKind kind, double t) {
  EssentialConstraint out;
  for (const auto& label : labels) {
    const Side side = space.mesh().side_of(label);
    out.merge(essential_values(space, {label}, side_component(f, side, kind, t), kind));
  }
  return out;
}

Eigen::VectorXd vector_natural(const FunctionSpace& space, const std::set<std::string>& labels,
                               const SpaceTimeVector& f, TraceKind data_kind, TraceKind trace,
                               double t, int qp) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.dof_count());
  if (!f) return out;
  for (const auto& label : labels) {
    const Side side = space.mesh().side_of(label);
    out += boundary_functional(space, {label}, side_component(f, side, data_kind, t), trace, qp);
  }
  return out;
}

Eigen::VectorXd scalar_natural(const FunctionSpace& space, const std::set<std::string>& labels,
                               const SpaceTimeScalar& f, TraceKind trace, double t, int qp) {
  if (!f || labels.empty()) return Eigen::VectorXd::Zero(space.dof_count());
  return boundary_functional(space, labels, at_time(f, t), trace, qp);
}

double relative_change(const SparseMatrix& mass, const Eigen::VectorXd& a,
                       const Eigen::VectorXd& b) {
  const Eigen::VectorXd d = a - b;
  const double num = std::sqrt(std::max(0.0, d.dot(mass * d)));
  const double den = std::sqrt(std::max(0.0, a.dot(mass * a)));
  return den > 0.0 ? num / den : num;
}

}  // namespace

double l2_norm(const Discretization& disc, const Field& field) {
  const SparseMatrix& m = disc.mass(field.sp().kind());
  return std::sqrt(std::max(0.0, field.coeffs.dot(m * field.coeffs)));
}

Integrator::Integrator(DiscretizationPtr disc, PhysParams params, ProblemData data,
                       Scheme scheme, StepperOptions options)
    : disc_(std::move(disc)),
      params_(params),
      data_(std::move(data)),
      scheme_(scheme),
      options_(options),
      maxwell_solver_(options.linear),
      fluid_solver_(options.linear),
      cn_solver_(options.linear) {
  if (!disc_) throw std::invalid_argument("integrator: null discretization");
  params_.validate();
  options_.picard.validate();
  data_.partition.validate(disc_->mesh());
}

Field Integrator::initial_vorticity(const Field& u, double t) const {
  const Discretization& d = *disc_;
  const auto& part = data_.partition;
  SparseMatrix a = d.mass(SpaceKind::G);
  Eigen::VectorXd rhs =
      derivative_pairing(d, PairingKind::velocity_perpgrad).matrix * u.coeffs +
      vector_natural(*d.G, part.gamma_u_tangential, data_.velocity, TraceKind::tangential,
                     TraceKind::scalar, t, d.quad_points());
  const EssentialConstraint bc =
      essential_values(*d.G, part.gamma_omega, at_time(data_.vorticity, t), TraceKind::scalar);
  essential_bc_apply(a, rhs, bc);
  return Field(d.G, solve_linear(a, rhs, options_.linear), u.tag);
}

State Integrator::initialize(const Field& u0, const Field& H0) {
  const Discretization& d = *disc_;
  if (u0.space != d.D || H0.space != d.C) {
    throw std::invalid_argument("initialize: u must live in D and H in C of this discretization");
  }
  State s;
  s.k = 0;
  s.t = 0.0;
  s.u = Field(d.D, u0.coeffs, TimeTag::integer(0));
  s.omega = data_.initial_vorticity ? project(d.G, data_.initial_vorticity)
                                    : initial_vorticity(s.u, 0.0);
  s.omega.tag = TimeTag::integer(0);
  s.P = Field(d.S, Eigen::VectorXd::Zero(d.S->dof_count()), TimeTag{-1});
  s.H = Field(d.C, H0.coeffs, TimeTag::integer(0));
  if (scheme_ == Scheme::decoupled) {
    s.H = prestep_half(s);
  }
  return s;
}

Field Integrator::prestep_half(const State& state0) {
  State half = coupled_cn_step(state0, 0.5 * params_.dt);
  Field h = std::move(half.H);
  h.tag = TimeTag::half_after(state0.k);
  return h;
}

State Integrator::step(const State& state) {
  const int k = state.k + 1;
  try {
    if (scheme_ == Scheme::coupled_cn) {
      return coupled_cn_step(state, params_.dt);
    }
    FluidUpdate fluid = step1_fluid(state);
    State next;
    next.k = k;
    next.t = state.t + params_.dt;
    next.H = step2_maxwell(state.H, fluid.u, k);
    next.u = std::move(fluid.u);
    next.omega = std::move(fluid.omega);
    next.P = std::move(fluid.P);
    return next;
  } catch (const StepError&) {
    throw;
  } catch (const std::exception& e) {
    throw StepError(k, e.what());
  }
}

FluidUpdate Integrator::step1_fluid(const State& state) {
  const Discretization& d = *disc_;
  const auto& part = data_.partition;
  const int k = state.k + 1;
  const double dt = params_.dt;
  const double t_k = state.t + dt;
  const double t_mid = state.t + 0.5 * dt;
  const int qp = d.quad_points();
  const int nD = d.D->dof_count(), nG = d.G->dof_count(), nS = d.S->dof_count();
  const int oW = nD, oP = nD + nG, n = nD + nG + nS;

  const SparseMatrix& MD = d.mass(SpaceKind::D);
  const SparseMatrix& MG = d.mass(SpaceKind::G);
  const SparseMatrix pg_v = derivative_pairing(d, PairingKind::perpgrad_velocity).matrix;
  const SparseMatrix v_pg = derivative_pairing(d, PairingKind::velocity_perpgrad).matrix;
  const SparseMatrix div_t = SparseMatrix(d.div.transpose() * d.mass(SpaceKind::S));

  Triplets fixed;
  add_block(fixed, MD, 0, 0);
  if (!params_.ideal_fluid()) add_block(fixed, pg_v, 0, oW, 0.5 * dt * params_.inv_Rf());
  add_block(fixed, div_t, 0, oP, -dt);
  add_block(fixed, v_pg, oW, 0, -1.0);
  add_block(fixed, MG, oW, oW);
  add_block(fixed, d.div, oP, 0);

  // Lorentz force from the known magnetic field at t^{k-1/2}.
  const Field j(d.S, d.rot * state.H.coeffs, state.H.tag);
  const Eigen::VectorXd lorentz =
      trilinear_scalar_frozen(j, *d.C, *d.D, qp, d.threads()).matrix * state.H.coeffs;

  Eigen::VectorXd rhs_fixed = Eigen::VectorXd::Zero(n);
  rhs_fixed.head(nD) = MD * state.u.coeffs + dt * params_.c * lorentz;
  if (!params_.ideal_fluid()) {
    rhs_fixed.head(nD) -= 0.5 * dt * params_.inv_Rf() * (pg_v * state.omega.coeffs);
  }
  if (data_.forcing) {
    rhs_fixed.head(nD) += dt * load_vector(*d.D, at_time(data_.forcing, t_mid), qp);
  }
  rhs_fixed.head(nD) -=
      dt * scalar_natural(*d.D, part.gamma_P, data_.pressure, TraceKind::normal, t_mid, qp);
  rhs_fixed.segment(oW, nG) = vector_natural(*d.G, part.gamma_u_tangential, data_.velocity,
                                             TraceKind::tangential, TraceKind::scalar, t_k, qp);

  EssentialConstraint bc =
      vector_essential(*d.D, part.gamma_u_normal, data_.velocity, TraceKind::normal, t_k);
  bc.merge(essential_values(*d.G, part.gamma_omega, at_time(data_.vorticity, t_k),
                            TraceKind::scalar),
           oW);
  const bool pin = part.gamma_P.empty();
  if (pin) bc.merge(EssentialConstraint{{0}, {0.0}}, oP);

  const SparseMatrix fixed_matrix = build(fixed, n);
  auto builder = [&](const Eigen::VectorXd& x) {
    const Field w_star(d.G, 0.5 * (state.omega.coeffs + x.segment(oW, nG)));
    const SparseMatrix conv = trilinear_scalar_frozen(w_star, *d.D, *d.D, qp, d.threads()).matrix;
    Triplets t;
    add_block(t, conv, 0, 0, 0.5 * dt);
    LinearSystem sys{fixed_matrix + build(t, n), rhs_fixed};
    sys.rhs.head(nD) -= 0.5 * dt * (conv * state.u.coeffs);
    essential_bc_apply(sys.matrix, sys.rhs, bc);
    return sys;
  };
  Eigen::VectorXd guess(n);
  guess << state.u.coeffs, state.omega.coeffs, state.P.coeffs;
  const PicardResult res = picard_iterate(
      builder, guess, options_.picard, fluid_solver_,
      [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return relative_change(MD, a.head(nD), b.head(nD));
      });
  report_.picard_iterations = res.iterations;
  report_.picard_update = res.last_update;

  FluidUpdate out;
  out.u = Field(d.D, res.solution.head(nD), TimeTag::integer(k));
  out.omega = Field(d.G, res.solution.segment(oW, nG), TimeTag::integer(k));
  Eigen::VectorXd p = res.solution.tail(nS);
  if (pin) {
    const Eigen::VectorXd areas = project(d.S, [](double, double) { return 1.0; }).coeffs;
    p -= (p.sum() / d.mesh().area()) * areas;
  }
  out.P = Field(d.S, std::move(p), TimeTag::half_after(k - 1));
  return out;
}

Field Integrator::step2_maxwell(const Field& H_prev, const Field& u_k, int k) {
  const Discretization& d = *disc_;
  const auto& part = data_.partition;
  const double dt = params_.dt;
  const double t_k = k * dt;
  const double t_next = (k + 0.5) * dt;
  const int qp = d.quad_points();
  const SparseMatrix& MC = d.mass(SpaceKind::C);

  const bool reuse = options_.freeze_maxwell_matrix && maxwell_solver_.ready() &&
                     maxwell_u_.size() == u_k.coeffs.size() &&
                     relative_change(d.mass(SpaceKind::D), u_k.coeffs, maxwell_u_) <= 1e-12;
  if (!reuse) {
    const SparseMatrix adv = SparseMatrix(
        d.rot.transpose() *
        trilinear_vector_frozen(u_k, *d.S, *d.C, qp, d.threads()).matrix);
    SparseMatrix m = MC - 0.5 * dt * adv;
    if (!params_.ideal_magnetic()) {
      m += 0.5 * dt * params_.inv_Rm() * derivative_pairing(d, PairingKind::rot_rot).matrix;
    }
    maxwell_matrix_ = m;
    maxwell_u_ = u_k.coeffs;
  }
  // The right-hand operator is 2 M_C - (left operator).
  const SparseMatrix& A = maxwell_matrix_;
  Eigen::VectorXd rhs = 2.0 * (MC * H_prev.coeffs) - A * H_prev.coeffs;
  rhs += dt * scalar_natural(*d.C, part.gamma_E, data_.electric, TraceKind::tangential, t_k, qp);
  if (data_.ohm_source) {
    rhs += dt * (d.rot.transpose() * load_vector(*d.S, at_time(data_.ohm_source, t_k), qp));
  }
  const EssentialConstraint bc =
      vector_essential(*d.C, part.gamma_H, data_.magnetic, TraceKind::tangential, t_next);
  SparseMatrix a = A;
  essential_bc_apply(a, rhs, bc);
  Eigen::VectorXd h;
  report_.maxwell_refactorized = maxwell_solver_.solve_recycled(a, rhs, h);
  return Field(d.C, std::move(h), TimeTag::half_after(k));
}

State Integrator::coupled_cn_step(const State& state, double h) {
  const Discretization& d = *disc_;
  const auto& part = data_.partition;
  const double t1 = state.t + h;
  const double t_mid = state.t + 0.5 * h;
  const int qp = d.quad_points();
  const int nD = d.D->dof_count(), nG = d.G->dof_count(), nS = d.S->dof_count();
  const int nC = d.C->dof_count();
  const int oW = nD, oP = nD + nG, oH = nD + nG + nS, n = oH + nC;

  const SparseMatrix& MD = d.mass(SpaceKind::D);
  const SparseMatrix& MC = d.mass(SpaceKind::C);
  const SparseMatrix pg_v = derivative_pairing(d, PairingKind::perpgrad_velocity).matrix;
  const SparseMatrix v_pg = derivative_pairing(d, PairingKind::velocity_perpgrad).matrix;
  const SparseMatrix div_t = SparseMatrix(d.div.transpose() * d.mass(SpaceKind::S));
  const SparseMatrix rr = derivative_pairing(d, PairingKind::rot_rot).matrix;

  Triplets fixed;
  add_block(fixed, MD, 0, 0);
  if (!params_.ideal_fluid()) add_block(fixed, pg_v, 0, oW, 0.5 * h * params_.inv_Rf());
  add_block(fixed, div_t, 0, oP, -h);
  add_block(fixed, v_pg, oW, 0, -1.0);
  add_block(fixed, d.mass(SpaceKind::G), oW, oW);
  add_block(fixed, d.div, oP, 0);
  add_block(fixed, MC, oH, oH);
  if (!params_.ideal_magnetic()) add_block(fixed, rr, oH, oH, 0.5 * h * params_.inv_Rm());

  Eigen::VectorXd rhs_fixed = Eigen::VectorXd::Zero(n);
  rhs_fixed.head(nD) = MD * state.u.coeffs;
  if (!params_.ideal_fluid()) {
    rhs_fixed.head(nD) -= 0.5 * h * params_.inv_Rf() * (pg_v * state.omega.coeffs);
  }
  if (data_.forcing) {
    rhs_fixed.head(nD) += h * load_vector(*d.D, at_time(data_.forcing, t_mid), qp);
  }
  rhs_fixed.head(nD) -=
      h * scalar_natural(*d.D, part.gamma_P, data_.pressure, TraceKind::normal, t_mid, qp);
  rhs_fixed.segment(oW, nG) = vector_natural(*d.G, part.gamma_u_tangential, data_.velocity,
                                             TraceKind::tangential, TraceKind::scalar, t1, qp);
  rhs_fixed.segment(oH, nC) = MC * state.H.coeffs;
  if (!params_.ideal_magnetic()) {
    rhs_fixed.segment(oH, nC) -= 0.5 * h * params_.inv_Rm() * (rr * state.H.coeffs);
  }
  rhs_fixed.segment(oH, nC) +=
      h * scalar_natural(*d.C, part.gamma_E, data_.electric, TraceKind::tangential, t_mid, qp);
  if (data_.ohm_source) {
    rhs_fixed.segment(oH, nC) +=
        h * (d.rot.transpose() * load_vector(*d.S, at_time(data_.ohm_source, t_mid), qp));
  }

  EssentialConstraint bc =
      vector_essential(*d.D, part.gamma_u_normal, data_.velocity, TraceKind::normal, t1);
  bc.merge(essential_values(*d.G, part.gamma_omega, at_time(data_.vorticity, t1),
                            TraceKind::scalar),
           oW);
  const bool pin = part.gamma_P.empty();
  if (pin) bc.merge(EssentialConstraint{{0}, {0.0}}, oP);
  bc.merge(vector_essential(*d.C, part.gamma_H, data_.magnetic, TraceKind::tangential, t1), oH);

  const SparseMatrix fixed_matrix = build(fixed, n);
  // Convection freezes the averaged vorticity; both Lorentz couplings freeze
  // the averaged magnetic field in the same slot, so the coupling terms
  // cancel exactly in the energy balance of every iterate.
  auto builder = [&](const Eigen::VectorXd& x) {
    const Field w_star(d.G, 0.5 * (state.omega.coeffs + x.segment(oW, nG)));
    const Field h_star(d.C, 0.5 * (state.H.coeffs + x.segment(oH, nC)));
    const SparseMatrix conv = trilinear_scalar_frozen(w_star, *d.D, *d.D, qp, d.threads()).matrix;
    const SparseMatrix v = trilinear_vector_frozen(h_star, *d.S, *d.D, qp, d.threads()).matrix;
    const SparseMatrix lorentz = SparseMatrix(v.transpose() * d.rot);  // rows D, cols C
    const SparseMatrix induction = SparseMatrix(lorentz.transpose());  // rows C, cols D
    Triplets t;
    add_block(t, conv, 0, 0, 0.5 * h);
    add_block(t, lorentz, 0, oH, -0.5 * h * params_.c);
    add_block(t, induction, oH, 0, 0.5 * h);
    LinearSystem sys{fixed_matrix + build(t, n), rhs_fixed};
    sys.rhs.head(nD) -= 0.5 * h * (conv * state.u.coeffs);
    sys.rhs.head(nD) += 0.5 * h * params_.c * (lorentz * state.H.coeffs);
    sys.rhs.segment(oH, nC) -= 0.5 * h * (induction * state.u.coeffs);
    essential_bc_apply(sys.matrix, sys.rhs, bc);
    return sys;
  };
  Eigen::VectorXd guess(n);
  guess << state.u.coeffs, state.omega.coeffs, state.P.coeffs, state.H.coeffs;
  PicardResult res;
  try {
    res = picard_iterate(builder, guess, options_.picard, cn_solver_,
                         [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
                           return std::max(relative_change(MD, a.head(nD), b.head(nD)),
                                           relative_change(MC, a.tail(nC), b.tail(nC)));
                         });
  } catch (const std::exception& e) {
    throw StepError(state.k + 1, e.what());
  }
  report_.picard_iterations = res.iterations;
  report_.picard_update = res.last_update;

  State next;
  next.k = state.k + 1;
  next.t = t1;
  next.u = Field(d.D, res.solution.head(nD), TimeTag::integer(next.k));
  next.omega = Field(d.G, res.solution.segment(oW, nG), TimeTag::integer(next.k));
  Eigen::VectorXd p = res.solution.segment(oP, nS);
  if (pin) {
    const Eigen::VectorXd areas = project(d.S, [](double, double) { return 1.0; }).coeffs;
    p -= (p.sum() / d.mesh().area()) * areas;
  }
  next.P = Field(d.S, std::move(p), TimeTag::half_after(state.k));
  next.H = Field(d.C, res.solution.tail(nC), TimeTag::integer(next.k));
  return next;
}

int step_count(double t_end, double dt) {
  if (!(t_end >= 0.0) || !(dt > 0.0)) throw std::invalid_argument("step_count: bad t_end or dt");
  const double r = t_end / dt;
  const double nearest = std::round(r);
  if (std::abs(r - nearest) <= 1e-9 * std::max(1.0, r)) return static_cast<int>(nearest);
  return static_cast<int>(std::ceil(r));
}

RunSummary run(Integrator& integrator, const Field& u0, const Field& H0, const RunOptions& options,
               const StepObserver& observer) {
  const Discretization& d = integrator.disc();
  const double dt = integrator.params().dt;
  RunSummary summary;
  State state;
  try {
    state = integrator.initialize(u0, H0);
  } catch (const StepError&) {
    throw;
  } catch (const std::exception& e) {
    throw StepError(0, e.what());
  }
  if (observer) observer(state);
  const int target = options.steady ? options.max_steps : step_count(options.t_end, dt);
  for (int s = 0; s < target; ++s) {
    State next = integrator.step(state);
    const double du = l2_norm(d, Field(d.D, next.u.coeffs - state.u.coeffs));
    const double dh = l2_norm(d, Field(d.C, next.H.coeffs - state.H.coeffs));
    summary.last_increment = std::max(du, dh) / dt;
    state = std::move(next);
    ++summary.steps;
    if (observer) observer(state);
    if (options.steady && summary.last_increment < options.steady_tolerance) {
      summary.steady_reached = true;
      break;
    }
  }
  summary.final_state = std::move(state);
  return summary;
}

}  // namespace mhd
