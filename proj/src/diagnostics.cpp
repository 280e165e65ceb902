#include "mhd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace mhd {

double kinetic_energy(const Discretization& disc, const Field& u) {
  return 0.5 * u.coeffs.dot(disc.mass(SpaceKind::D) * u.coeffs);
}

double magnetic_energy(const Discretization& disc, const Field& H, double c) {
  return 0.5 * c * H.coeffs.dot(disc.mass(SpaceKind::C) * H.coeffs);
}

double budget_residual(const DiagnosticsRecord& current, const DiagnosticsRecord& previous,
                       const PhysParams& params) {
  if (current.k != previous.k + 1) {
    throw std::invalid_argument("budget_residual: records are not consecutive");
  }
  const double rate = (current.Etilde - previous.Etilde) / params.dt;
  const double terms = current.F - params.inv_Rf() * current.S -
                       params.c * params.inv_Rm() * current.Jtilde +
                       params.c * (current.A - current.Atilde);
  return rate - terms;
}

double divergence_u_l2(const Discretization& disc, const Field& u) {
  const Eigen::VectorXd d = disc.div * u.coeffs;
  return std::sqrt(std::max(0.0, d.dot(disc.mass(SpaceKind::S) * d)));
}

ElementDivergence divergence_h_elementwise(const Discretization& disc, const Field& H) {
  const FunctionSpace& space = *disc.C;
  const ElementEvaluator ev(space, TensorRule::gauss(disc.degree() + 2));
  ElementDivergence out;
  double total = 0.0;
  for (int e = 0; e < space.mesh().num_elements(); ++e) {
    const LocalBasis b = ev.evaluate(e, true);
    const Eigen::VectorXd h = H.local(e);
    const Eigen::VectorXd div = b.d_dx[0].transpose() * h + b.d_dy[1].transpose() * h;
    const double sq = div.cwiseAbs2().dot(b.weights);
    total += sq;
    out.max_element = std::max(out.max_element, std::sqrt(sq));
  }
  out.l2 = std::sqrt(total);
  return out;
}

double max_abs_sampled(const Field& field, int points) {
  if (points < 2) throw std::invalid_argument("max_abs_sampled: need at least two points");
  const FunctionSpace& space = *field.space;
  std::vector<double> xi(points);
  for (int i = 0; i < points; ++i) xi[i] = -1.0 + 2.0 * i / (points - 1);
  const ElementEvaluator ev(space, xi, xi);
  const bool vector = space.kind() == SpaceKind::C || space.kind() == SpaceKind::D;
  double out = 0.0;
  for (int e = 0; e < space.mesh().num_elements(); ++e) {
    const LocalBasis b = ev.evaluate(e);
    const Eigen::VectorXd c = field.local(e);
    Eigen::VectorXd mag = (b.comp[0].transpose() * c).cwiseAbs2();
    if (vector) mag += (b.comp[1].transpose() * c).cwiseAbs2();
    out = std::max(out, std::sqrt(mag.maxCoeff()));
  }
  return out;
}

Eigen::VectorXd normal_trace_pairing(const Discretization& disc, const Field& H,
                                     const std::set<std::string>& labels) {
  const FunctionSpace& g = *disc.G;
  const FunctionSpace& c = *disc.C;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.dof_count());
  const QuadratureRule rule = gauss_legendre(disc.degree() + 2);
  const std::vector<double> s(rule.points.begin(), rule.points.end());
  for (const auto& label : labels) {
    const Mesh& mesh = disc.mesh();
    const Side side = mesh.side_of(label);
    const Vec2 n = side_normal(side);
    const bool vertical = side == Side::left || side == Side::right;
    const std::vector<double> fixed{(side == Side::left || side == Side::bottom) ? -1.0 : 1.0};
    for (const BoundaryFace& face : mesh.boundary_faces(label)) {
      const auto [ex, ey] = mesh.element_coords(face.element);
      const double half = 0.5 * (vertical ? mesh.hy(ey) : mesh.hx(ex));
      const ElementEvaluator evc = vertical ? ElementEvaluator(c, fixed, s) : ElementEvaluator(c, s, fixed);
      const ElementEvaluator evg = vertical ? ElementEvaluator(g, fixed, s) : ElementEvaluator(g, s, fixed);
      const LocalBasis bc = evc.evaluate(face.element);
      const LocalBasis bg = evg.evaluate(face.element);
      const Eigen::VectorXd h = H.local(face.element);
      const Eigen::VectorXd hn = n[0] * (bc.comp[0].transpose() * h) + n[1] * (bc.comp[1].transpose() * h);
      Eigen::VectorXd w(rule.size());
      for (int q = 0; q < rule.size(); ++q) w[q] = rule.weights[q] * half * hn[q];
      const Eigen::VectorXd local = bg.comp[0] * w;
      const auto dofs = g.element_dofs(face.element);
      for (std::size_t i = 0; i < dofs.size(); ++i) out[dofs[i]] += local[static_cast<int>(i)];
    }
  }
  return out;
}

WeakGaussMonitor::WeakGaussMonitor(DiscretizationPtr disc, PhysParams params, ProblemData data,
                                   Scheme scheme)
    : disc_(std::move(disc)), params_(params), data_(std::move(data)), scheme_(scheme) {
  mask_.assign(static_cast<std::size_t>(disc_->G->dof_count()), 1);
  for (const auto& label : data_.partition.gamma_H) {
    for (int dof : trace_dofs(*disc_->G, label, TraceKind::scalar).dofs) mask_[dof] = 0;
  }
}

Eigen::VectorXd WeakGaussMonitor::restrict(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out = v;
  for (int i = 0; i < out.size(); ++i) {
    if (!mask_[i]) out[i] = 0.0;
  }
  return out;
}

Eigen::VectorXd WeakGaussMonitor::functional(const Field& H) const {
  return restrict(disc_->grad.transpose() * (disc_->mass(SpaceKind::C) * H.coeffs));
}

Eigen::VectorXd WeakGaussMonitor::boundary_work(double t) const {
  const Discretization& d = *disc_;
  if (!data_.electric || data_.partition.gamma_E.empty()) {
    return Eigen::VectorXd::Zero(d.G->dof_count());
  }
  const ScalarFunction e = [f = data_.electric, t](double x, double y) { return f(x, y, t); };
  return restrict(d.grad.transpose() * boundary_functional(*d.C, data_.partition.gamma_E, e,
                                                           TraceKind::tangential,
                                                           d.quad_points()));
}

void WeakGaussMonitor::start(const Field& H0, const State& state0) {
  accumulated_ = restrict(normal_trace_pairing(*disc_, H0, data_.partition.gamma_E));
  if (scheme_ == Scheme::decoupled) {
    accumulated_ += 0.5 * params_.dt * boundary_work(0.25 * params_.dt);
  }
  reference_ = functional(state0.H) - accumulated_;
}

Eigen::VectorXd WeakGaussMonitor::advance(const State& state) {
  const double t = scheme_ == Scheme::decoupled ? state.t : state.t - 0.5 * params_.dt;
  accumulated_ += params_.dt * boundary_work(t);
  return functional(state.H) - accumulated_;
}

DiagnosticsTracker::DiagnosticsTracker(DiscretizationPtr disc, PhysParams params,
                                       ProblemData data, Scheme scheme)
    : disc_(disc), params_(params), data_(data), scheme_(scheme),
      gauss_(std::move(disc), params, std::move(data), scheme) {}

void DiagnosticsTracker::fill_monitors(DiagnosticsRecord& r, const State& s,
                                       const Eigen::VectorXd& weak) const {
  r.div_u_L2 = divergence_u_l2(*disc_, s.u);
  const ElementDivergence dh = divergence_h_elementwise(*disc_, s.H);
  r.div_H_L2 = dh.l2;
  r.div_H_max_element = dh.max_element;
  r.weak_divH_max = weak.size() ? weak.cwiseAbs().maxCoeff() : 0.0;
  r.weak_divH_drift = weak.size() ? (weak - gauss_.reference()).cwiseAbs().maxCoeff() : 0.0;
}

const DiagnosticsRecord& DiagnosticsTracker::start(const State& state0, const Field& H0) {
  const Discretization& d = *disc_;
  const int qp = d.quad_points();
  records_.clear();
  gauss_.start(H0, state0);
  DiagnosticsRecord r;
  r.k = state0.k;
  r.t = state0.t;
  r.K = kinetic_energy(d, state0.u);
  r.M_minus = magnetic_energy(d, H0, params_.c);
  r.M_plus = magnetic_energy(d, state0.H, params_.c);
  r.Mtilde = scheme_ == Scheme::decoupled ? 0.5 * (r.M_minus + r.M_plus) : r.M_plus;
  r.Etilde = r.K + r.Mtilde;
  const Field hmid(d.C, scheme_ == Scheme::decoupled ? Eigen::VectorXd(0.5 * (H0.coeffs + state0.H.coeffs))
                                                     : state0.H.coeffs);
  const Field j(d.S, d.rot * hmid.coeffs);
  r.J = j.coeffs.dot(d.mass(SpaceKind::S) * j.coeffs);
  r.A = trilinear_value(j, hmid, state0.u, qp);
  r.A_k = r.A;
  fill_monitors(r, state0, gauss_.reference());
  previous_ = state0;
  records_.push_back(r);
  return records_.back();
}

const DiagnosticsRecord& DiagnosticsTracker::advance(const State& s) {
  if (records_.empty()) throw std::logic_error("diagnostics: advance before start");
  const Discretization& d = *disc_;
  const int qp = d.quad_points();
  const SparseMatrix& MS = d.mass(SpaceKind::S);
  const DiagnosticsRecord& prev = records_.back();
  DiagnosticsRecord r;
  r.k = s.k;
  r.t = s.t;
  r.K = kinetic_energy(d, s.u);
  const Field ubar(d.D, 0.5 * (previous_.u.coeffs + s.u.coeffs));
  const Eigen::VectorXd wbar = 0.5 * (previous_.omega.coeffs + s.omega.coeffs);
  r.S = wbar.dot(d.mass(SpaceKind::G) * wbar);
  if (data_.forcing) {
    const double tm = s.t - 0.5 * params_.dt;
    const VectorFunction f = [g = data_.forcing, tm](double x, double y) { return g(x, y, tm); };
    r.F = load_vector(*d.D, f, qp).dot(ubar.coeffs);
  }
  r.M_minus = magnetic_energy(d, previous_.H, params_.c);
  r.M_plus = magnetic_energy(d, s.H, params_.c);
  const Field hmid(d.C, 0.5 * (previous_.H.coeffs + s.H.coeffs));
  const Field jmid(d.S, d.rot * hmid.coeffs);
  if (scheme_ == Scheme::decoupled) {
    r.Mtilde = 0.5 * (r.M_minus + r.M_plus);
    r.J = jmid.coeffs.dot(MS * jmid.coeffs);
    r.Jtilde = 0.5 * (r.J + prev.J);
    const Field jprev(d.S, d.rot * previous_.H.coeffs);
    r.A = trilinear_value(jprev, previous_.H, ubar, qp);
    const double a_k = trilinear_value(jmid, hmid, s.u, qp);
    r.Atilde = 0.5 * (a_k + prev.A_k);
    r.A_k = a_k;
  } else {
    r.Mtilde = r.M_plus;
    r.J = jmid.coeffs.dot(MS * jmid.coeffs);
    r.Jtilde = r.J;
    r.A = trilinear_value(jmid, hmid, ubar, qp);
    r.Atilde = r.A;
    r.A_k = r.A;
  }
  r.Etilde = r.K + r.Mtilde;
  r.budget_defined = scheme_ == Scheme::coupled_cn || s.k >= 2;
  r.budget_residual = r.budget_defined ? budget_residual(r, prev, params_) : 0.0;
  fill_monitors(r, s, gauss_.advance(s));
  previous_ = s;
  records_.push_back(r);
  return records_.back();
}

Field stream_function(const Discretization& disc, const Field& field) {
  const FunctionSpace& g = *disc.G;
  const SpaceKind kind = field.sp().kind();
  if (kind != SpaceKind::D && kind != SpaceKind::C) {
    throw std::invalid_argument("stream_function: field must be a 2D vector field (C or D)");
  }
  const FunctionSpace& fs = field.sp();
  const QuadratureRule rule = gauss_legendre(disc.degree() + 2);
  // Increment of psi from node (i, J) to (i + 1, J) and from (I, j) to (I, j + 1).
  auto step_x = [&](int i, int J) {
    if (kind == SpaceKind::D) return -field.coeffs[fs.y_flux_index(i, J)];
    const double a = g.lattice_coordinate_x(i), b = g.lattice_coordinate_x(i + 1);
    const double y = g.lattice_coordinate_y(J);
    double sum = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      const double x = 0.5 * (a + b) + 0.5 * (b - a) * rule.points[q];
      sum -= rule.weights[q] * 0.5 * (b - a) * evaluate_vector(field, x, y)[1];
    }
    return sum;
  };
  auto step_y = [&](int I, int j) {
    if (kind == SpaceKind::D) return field.coeffs[fs.x_flux_index(I, j)];
    const double a = g.lattice_coordinate_y(j), b = g.lattice_coordinate_y(j + 1);
    const double x = g.lattice_coordinate_x(I);
    double sum = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      const double y = 0.5 * (a + b) + 0.5 * (b - a) * rule.points[q];
      sum += rule.weights[q] * 0.5 * (b - a) * evaluate_vector(field, x, y)[0];
    }
    return sum;
  };
  const int nx = g.nodes_x(), ny = g.nodes_y();
  Eigen::MatrixXd along_x(nx, ny), along_y(nx, ny);
  along_x(0, 0) = along_y(0, 0) = 0.0;
  for (int i = 1; i < nx; ++i) along_x(i, 0) = along_x(i - 1, 0) + step_x(i - 1, 0);
  for (int i = 0; i < nx; ++i) {
    for (int j = 1; j < ny; ++j) along_x(i, j) = along_x(i, j - 1) + step_y(i, j - 1);
  }
  for (int j = 1; j < ny; ++j) along_y(0, j) = along_y(0, j - 1) + step_y(0, j - 1);
  for (int j = 0; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) along_y(i, j) = along_y(i - 1, j) + step_x(i - 1, j);
  }
  Eigen::VectorXd psi(g.dof_count());
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) psi[g.node_index(i, j)] = 0.5 * (along_x(i, j) + along_y(i, j));
  }
  return Field(disc.G, std::move(psi), field.tag);
}

}  // namespace mhd
