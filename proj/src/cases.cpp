#include "mhd/cases.hpp"

#include <cmath>
#include <numbers>

namespace mhd {

namespace {

constexpr double kPi = std::numbers::pi;

std::set<std::string> labels(std::initializer_list<Side> sides) {
  std::set<std::string> out;
  for (Side s : sides) out.emplace(side_label(s));
  return out;
}

SpaceTimeScalar scalar_fn(const Expr& e) {
  return [e](double x, double y, double t) { return e(x, y, t); };
}

SpaceTimeVector vector_fn(const Expr& a, const Expr& b) {
  return [a, b](double x, double y, double t) { return Vec2{a(x, y, t), b(x, y, t)}; };
}

VectorFunction at_zero(const SpaceTimeVector& f) {
  return [f](double x, double y) { return f(x, y, 0.0); };
}

}  // namespace

SpaceTimeVector ManufacturedSolution::u_fn() const { return vector_fn(ux, uy); }
SpaceTimeVector ManufacturedSolution::H_fn() const { return vector_fn(Hx, Hy); }
SpaceTimeVector ManufacturedSolution::f_fn() const { return vector_fn(fx, fy); }

ManufacturedSolution mms_build(double Rf, double Rm, double c) {
  const Expr x = Expr::var(Var::x), y = Expr::var(Var::y), t = Expr::var(Var::t);
  ManufacturedSolution m;
  m.Rf = Rf;
  m.Rm = Rm;
  m.c = c;
  const Expr et = exp(t);
  m.ux = cos(x) * sin(y) * et;
  m.uy = -(sin(x) * cos(y) * et);
  m.P = cos(x) * cos(y) * exp(-t);
  const Expr e0 = cos(x) * sin(0.5 * y);
  m.E = e0 * et;
  const Expr growth = et - 1.0;
  m.Hx = -(growth * e0.diff(Var::y));
  m.Hy = growth * e0.diff(Var::x);
  m.omega = m.uy.diff(Var::x) - m.ux.diff(Var::y);
  m.j = m.Hy.diff(Var::x) - m.Hx.diff(Var::y);

  const double inv_rf = std::isinf(Rf) ? 0.0 : 1.0 / Rf;
  const double inv_rm = std::isinf(Rm) ? 0.0 : 1.0 / Rm;
  // omega x u = omega (-u_y, u_x); curl omega = (d omega/dy, -d omega/dx); j x H = j (-H_y, H_x).
  m.fx = m.ux.diff(Var::t) - m.omega * m.uy + inv_rf * m.omega.diff(Var::y) +
         c * m.j * m.Hy + m.P.diff(Var::x);
  m.fy = m.uy.diff(Var::t) + m.omega * m.ux - inv_rf * m.omega.diff(Var::x) -
         c * m.j * m.Hx + m.P.diff(Var::y);
  m.e = inv_rm * m.j - (m.E + m.ux * m.Hy - m.uy * m.Hx);
  return m;
}

std::shared_ptr<const Mesh> CaseSpec::build_mesh() const {
  return std::make_shared<const Mesh>(bounds, kx, ky, stretch, periodic);
}

CaseSpec mms_case(int degree, int k, double dt, double t_end, double Rf, double Rm, double c,
                  double length) {
  CaseSpec s;
  s.name = "mms";
  s.bounds = {0.0, length, 0.0, length};
  s.kx = s.ky = k;
  s.degree = degree;
  s.params = {Rf, Rm, c, dt};
  s.t_end = t_end;
  const ManufacturedSolution m = mms_build(Rf, Rm, c);
  ProblemData& d = s.data;
  d.partition.gamma_P = labels({Side::left, Side::top});
  d.partition.gamma_u_normal = labels({Side::right, Side::bottom});
  d.partition.gamma_u_tangential = labels({Side::right, Side::bottom});
  d.partition.gamma_omega = labels({Side::left, Side::top});
  d.partition.gamma_E = labels({Side::right, Side::top});
  d.partition.gamma_H = labels({Side::left, Side::bottom});
  d.pressure = scalar_fn(m.P);
  d.velocity = m.u_fn();
  d.vorticity = scalar_fn(m.omega);
  d.electric = scalar_fn(m.E);
  d.magnetic = m.H_fn();
  d.forcing = m.f_fn();
  d.ohm_source = scalar_fn(m.e);
  d.initial_vorticity = [w = m.omega](double x, double y) { return w(x, y, 0.0); };
  s.u0 = at_zero(m.u_fn());
  s.H0 = at_zero(m.H_fn());
  s.mms = m;
  return s;
}

CaseSpec conservation_case(int degree, int k, double dt, double t_end, double Rf, double Rm,
                           double c) {
  CaseSpec s;
  s.name = "conservation";
  s.bounds = {0.0, 1.0, 0.0, 1.0};
  s.kx = s.ky = k;
  s.degree = degree;
  s.params = {Rf, Rm, c, dt};
  s.t_end = t_end;
  s.data.partition = BoundaryPartition::all_natural(*s.build_mesh());
  s.u0 = [](double x, double y) {
    return Vec2{-std::sin(kPi * (x - 0.5)) * std::cos(kPi * (y - 0.5)),
                std::cos(kPi * (x - 0.5)) * std::sin(kPi * (y - 0.5))};
  };
  s.H0 = [](double x, double y) {
    return Vec2{-std::sin(kPi * x) * std::cos(kPi * y), std::cos(kPi * x) * std::sin(kPi * y)};
  };
  return s;
}

CaseSpec orszag_tang_case(int degree, int k, double dt, double t_end, double Rf, double Rm,
                          double c) {
  CaseSpec s;
  s.name = "orszag-tang";
  s.bounds = {0.0, 2.0 * kPi, 0.0, 2.0 * kPi};
  s.kx = s.ky = k;
  s.periodic = {true, true};
  s.degree = degree;
  s.params = {Rf, Rm, c, dt};
  s.t_end = t_end;
  // u = perp-grad(2 sin y - 2 cos x), H = perp-grad(cos 2y - 2 cos x).
  s.u0 = [](double x, double y) { return Vec2{2.0 * std::cos(y), -2.0 * std::sin(x)}; };
  s.H0 = [](double x, double y) { return Vec2{-2.0 * std::sin(2.0 * y), -2.0 * std::sin(x)}; };
  return s;
}

CaseSpec lid_driven_cavity_case(int degree, int k, double dt, double steady_tolerance, double Rf,
                                double Rm, double c) {
  CaseSpec s;
  s.name = "cavity";
  s.bounds = {0.0, 1.0, 0.0, 1.0};
  s.kx = s.ky = k;
  s.stretch = {Stretch::boundary_refined, Stretch::boundary_refined};
  s.degree = degree;
  s.params = {Rf, Rm, c > 0.0 ? c : 1.0 / Rm, dt};
  s.steady = true;
  s.steady_tolerance = steady_tolerance;
  s.t_end = 0.0;
  const std::set<std::string> all = labels({Side::left, Side::right, Side::bottom, Side::top});
  BoundaryPartition& p = s.data.partition;
  p.gamma_u_normal = all;
  p.gamma_u_tangential = all;
  p.gamma_E = all;
  const double top = s.bounds.y_max;
  s.data.velocity = [top](double, double y, double) {
    return y >= top - 1e-12 ? Vec2{1.0, 0.0} : Vec2{0.0, 0.0};
  };
  s.u0 = [](double, double) { return Vec2{0.0, 0.0}; };
  s.H0 = [](double, double) { return Vec2{0.0, 1.0}; };
  return s;
}

const std::vector<std::string>& case_names() {
  static const std::vector<std::string> names{"mms", "conservation", "orszag-tang", "cavity"};
  return names;
}

CaseSpec make_case(std::string_view name, const CaseOverrides& o) {
  const double inf = std::numeric_limits<double>::infinity();
  CaseSpec s;
  if (name == "mms") {
    s = mms_case(o.degree.value_or(3), o.kx.value_or(8), o.dt.value_or(0.05),
                 o.t_end.value_or(1.0), o.Rf.value_or(1.0), o.Rm.value_or(1.0), o.c.value_or(1.0));
  } else if (name == "conservation") {
    s = conservation_case(o.degree.value_or(2), o.kx.value_or(8), o.dt.value_or(0.02),
                          o.t_end.value_or(2.0), o.Rf.value_or(inf), o.Rm.value_or(inf),
                          o.c.value_or(1.0));
  } else if (name == "orszag-tang") {
    s = orszag_tang_case(o.degree.value_or(4), o.kx.value_or(48), o.dt.value_or(1.0 / 200.0),
                         o.t_end.value_or(1.0), o.Rf.value_or(100.0), o.Rm.value_or(100.0),
                         o.c.value_or(1.0));
  } else if (name == "cavity") {
    s = lid_driven_cavity_case(o.degree.value_or(3), o.kx.value_or(32),
                               o.dt.value_or(1.0 / 1000.0), o.steady_tolerance.value_or(1e-5),
                               o.Rf.value_or(400.0), o.Rm.value_or(400.0), o.c.value_or(0.0));
  } else {
    throw std::invalid_argument("unknown case '" + std::string(name) +
                                "' (expected mms, conservation, orszag-tang or cavity)");
  }
  if (o.kx) s.kx = *o.kx;
  if (o.ky) s.ky = *o.ky;
  if (o.steady) s.steady = *o.steady;
  if (o.t_end) s.t_end = *o.t_end;
  if (o.t_end && !o.steady) s.steady = false;
  if (o.steady && !*o.steady && !o.t_end && s.t_end <= 0.0) {
    throw std::invalid_argument("case '" + s.name + "' needs t_end when steady is off");
  }
  if (o.steady_tolerance) s.steady_tolerance = *o.steady_tolerance;
  s.params.validate();
  return s;
}

ErrorNorms mms_errors(const Discretization& d, const State& state,
                      const ManufacturedSolution& m, double dt) {
  const TensorRule rule = TensorRule::gauss(d.degree() + 4);
  const ElementEvaluator eu(*d.D, rule), ew(*d.G, rule), ep(*d.S, rule), eh(*d.C, rule);
  const double tu = state.u.tag.value() * dt, tw = state.omega.tag.value() * dt;
  const double tp = state.P.tag.value() * dt, th = state.H.tag.value() * dt;
  const Expr wx = m.omega.diff(Var::x), wy = m.omega.diff(Var::y);
  const Expr div = m.ux.diff(Var::x) + m.uy.diff(Var::y);
  double u2 = 0, du2 = 0, w2 = 0, gw2 = 0, p2 = 0, h2 = 0, rh2 = 0;
  for (int e = 0; e < d.mesh().num_elements(); ++e) {
    const LocalBasis bu = eu.evaluate(e, true), bw = ew.evaluate(e, true);
    const LocalBasis bp = ep.evaluate(e), bh = eh.evaluate(e, true);
    const Eigen::VectorXd cu = state.u.local(e), cw = state.omega.local(e);
    const Eigen::VectorXd cp = state.P.local(e), ch = state.H.local(e);
    const Eigen::VectorXd ux = bu.comp[0].transpose() * cu, uy = bu.comp[1].transpose() * cu;
    const Eigen::VectorXd udiv = bu.d_dx[0].transpose() * cu + bu.d_dy[1].transpose() * cu;
    const Eigen::VectorXd w = bw.comp[0].transpose() * cw;
    const Eigen::VectorXd gx = bw.d_dx[0].transpose() * cw, gy = bw.d_dy[0].transpose() * cw;
    const Eigen::VectorXd p = bp.comp[0].transpose() * cp;
    const Eigen::VectorXd hx = bh.comp[0].transpose() * ch, hy = bh.comp[1].transpose() * ch;
    const Eigen::VectorXd rot = bh.d_dx[1].transpose() * ch - bh.d_dy[0].transpose() * ch;
    for (int q = 0; q < rule.size(); ++q) {
      const double x = bu.points[q][0], y = bu.points[q][1], wt = bu.weights[q];
      auto sq = [](double a) { return a * a; };
      u2 += wt * (sq(ux[q] - m.ux(x, y, tu)) + sq(uy[q] - m.uy(x, y, tu)));
      du2 += wt * sq(udiv[q] - div(x, y, tu));
      w2 += wt * sq(w[q] - m.omega(x, y, tw));
      gw2 += wt * (sq(gx[q] - wx(x, y, tw)) + sq(gy[q] - wy(x, y, tw)));
      p2 += wt * sq(p[q] - m.P(x, y, tp));
      h2 += wt * (sq(hx[q] - m.Hx(x, y, th)) + sq(hy[q] - m.Hy(x, y, th)));
      rh2 += wt * sq(rot[q] - m.j(x, y, th));
    }
  }
  ErrorNorms n;
  n.u_l2 = std::sqrt(u2);
  n.u_hdiv = std::sqrt(u2 + du2);
  n.omega_l2 = std::sqrt(w2);
  n.omega_h1 = std::sqrt(w2 + gw2);
  n.P_l2 = std::sqrt(p2);
  n.H_l2 = std::sqrt(h2);
  n.H_hcurl = std::sqrt(h2 + rh2);
  return n;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_slope: need at least two matching points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ErrorNorms mms_run(int degree, int k, double dt, const SweepOptions& options) {
  const CaseSpec spec = mms_case(degree, k, dt, options.t_end, 1.0, 1.0, 1.0, options.length);
  const auto disc = build_discretization(spec.build_mesh(), degree, options.assembly);
  Integrator integ(disc, spec.params, spec.data, options.scheme, options.stepper);
  const Field u0 = project(disc->D, spec.u0);
  const Field H0 = project(disc->C, spec.H0);
  RunOptions ro;
  ro.t_end = options.t_end;
  const RunSummary res = run(integ, u0, H0, ro);
  return mms_errors(*disc, res.final_state, *spec.mms, dt);
}

namespace {

void fit_rates(SweepResult& r) {
  std::vector<double> x, u, w, p, h;
  for (const auto& row : r.rows) {
    x.push_back(row.parameter);
    u.push_back(row.errors.u_hdiv);
    w.push_back(row.errors.omega_h1);
    p.push_back(row.errors.P_l2);
    h.push_back(row.errors.H_hcurl);
  }
  r.rate_u = fit_slope(x, u);
  r.rate_omega = fit_slope(x, w);
  r.rate_P = fit_slope(x, p);
  r.rate_H = fit_slope(x, h);
}

}  // namespace

SweepResult temporal_sweep(int degree, int k, const std::vector<double>& dts,
                           const SweepOptions& options) {
  SweepResult r;
  for (double dt : dts) {
    r.rows.push_back({dt, k, dt, mms_run(degree, k, dt, options)});
  }
  fit_rates(r);
  return r;
}

SweepResult spatial_sweep(int degree, const std::vector<int>& ks, double dt,
                          const SweepOptions& options) {
  SweepResult r;
  for (int k : ks) {
    r.rows.push_back({options.length / k, k, dt, mms_run(degree, k, dt, options)});
  }
  fit_rates(r);
  return r;
}

const std::vector<double>& centerline_stations() {
  static const std::vector<double> s{0.0, 0.05, 0.1, 0.15, 0.25, 0.5, 0.75, 0.85, 0.9, 0.95, 1.0};
  return s;
}

std::vector<CenterlineRow> centerline_extract(const State& state, bool x_direction) {
  std::vector<CenterlineRow> rows;
  for (double s : centerline_stations()) {
    CenterlineRow r;
    r.x = x_direction ? s : 0.5;
    r.y = x_direction ? 0.5 : s;
    const Vec2 u = evaluate_vector(state.u, r.x, r.y);
    const Vec2 h = evaluate_vector(state.H, r.x, r.y);
    r.u = u[0];
    r.v = u[1];
    r.omega = evaluate_scalar(state.omega, r.x, r.y);
    r.Hx = h[0];
    r.Hy = h[1];
    rows.push_back(r);
  }
  return rows;
}

}  // namespace mhd
