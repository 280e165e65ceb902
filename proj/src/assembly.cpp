#include "mhd/assembly.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace mhd {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MHD_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

/// Runs local(e, triplets) over contiguous element ranges, one per thread,
/// and concatenates the triplets in range order so the result does not
/// depend on the thread count.
template <class Local>
SparseMatrix assemble(int rows, int cols, int num_elements, int threads, Local local) {
  threads = std::max(1, std::min(threads, num_elements));
  std::vector<Triplets> parts(threads);
  auto work = [&](int t) {
    const int begin = static_cast<int>(static_cast<long>(num_elements) * t / threads);
    const int end = static_cast<int>(static_cast<long>(num_elements) * (t + 1) / threads);
    for (int e = begin; e < end; ++e) local(e, parts[t]);
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  Triplets all;
  all.reserve(total);
  for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  SparseMatrix m(rows, cols);
  m.setFromTriplets(all.begin(), all.end());
  m.makeCompressed();
  return m;
}

void scatter(const Eigen::MatrixXd& local, std::span<const int> rows, std::span<const int> cols,
             Triplets& out) {
  for (int j = 0; j < local.cols(); ++j)
    for (int i = 0; i < local.rows(); ++i) {
      if (local(i, j) != 0.0) out.emplace_back(rows[i], cols[j], local(i, j));
    }
}

int points_or_default(const FunctionSpace& space, int quad_points) {
  return quad_points > 0 ? quad_points : default_quadrature_points(space.degree());
}

/// Values of a field at the points of a local basis: one column per component.
Eigen::MatrixXd field_values(const Field& f, const LocalBasis& lb, int element) {
  const Eigen::VectorXd c = f.local(element);
  const int np = static_cast<int>(lb.comp[0].cols());
  Eigen::MatrixXd v(np, 2);
  v.col(0) = lb.comp[0].transpose() * c;
  if (is_vector_space(f.sp().kind())) {
    v.col(1) = lb.comp[1].transpose() * c;
  } else {
    v.col(1).setZero();
  }
  return v;
}

void require_same_mesh(const FunctionSpace& a, const FunctionSpace& b) {
  if (&a.mesh() != &b.mesh() || a.degree() != b.degree()) {
    throw std::invalid_argument("assembly: spaces live on different meshes or degrees");
  }
}

}  // namespace

SystemMatrix mass_matrix(const FunctionSpace& space, int quad_points, int threads) {
  const TensorRule rule = TensorRule::gauss(points_or_default(space, quad_points));
  const ElementEvaluator ev(space, rule);
  const bool vec = is_vector_space(space.kind());
  SparseMatrix m = assemble(space.dof_count(), space.dof_count(), space.mesh().num_elements(),
                            threads, [&](int e, Triplets& out) {
                              const LocalBasis lb = ev.evaluate(e);
                              const auto w = lb.weights.asDiagonal();
                              Eigen::MatrixXd local = lb.comp[0] * w * lb.comp[0].transpose();
                              if (vec) local += lb.comp[1] * w * lb.comp[1].transpose();
                              const auto dofs = space.element_dofs(e);
                              scatter(local, dofs, dofs, out);
                            });
  return {std::move(m), space.kind(), space.kind()};
}

Discretization::Discretization(std::shared_ptr<const Mesh> mesh, int degree,
                               AssemblyOptions options)
    : G(build_space(mesh, SpaceKind::G, degree)),
      C(build_space(mesh, SpaceKind::C, degree)),
      D(build_space(mesh, SpaceKind::D, degree)),
      S(build_space(mesh, SpaceKind::S, degree)),
      grad(incidence(*G, *C).as_real()),
      rot(incidence(*C, *S).as_real()),
      perp_grad(incidence(*G, *D).as_real()),
      div(incidence(*D, *S).as_real()),
      mesh_(std::move(mesh)),
      degree_(degree),
      quad_points_(options.quad_points > 0 ? options.quad_points
                                           : default_quadrature_points(degree)),
      threads_(resolve_threads(options.threads)),
      rule_(TensorRule::gauss(quad_points_)) {
  for (SpaceKind k : {SpaceKind::G, SpaceKind::C, SpaceKind::D, SpaceKind::S}) {
    mass_[static_cast<int>(k)] = mass_matrix(*space(k), quad_points_, threads_).matrix;
  }
}

const SpacePtr& Discretization::space(SpaceKind kind) const {
  switch (kind) {
    case SpaceKind::G: return G;
    case SpaceKind::C: return C;
    case SpaceKind::D: return D;
    case SpaceKind::S: return S;
  }
  return G;
}

const SparseMatrix& Discretization::mass(SpaceKind kind) const {
  return mass_[static_cast<int>(kind)];
}

DiscretizationPtr build_discretization(std::shared_ptr<const Mesh> mesh, int degree,
                                       AssemblyOptions options) {
  return std::make_shared<const Discretization>(std::move(mesh), degree, options);
}

SystemMatrix derivative_pairing(const Discretization& disc, PairingKind kind) {
  switch (kind) {
    case PairingKind::velocity_perpgrad: {
      SparseMatrix m = disc.perp_grad.transpose() * disc.mass(SpaceKind::D);
      return {std::move(m), SpaceKind::G, SpaceKind::D};
    }
    case PairingKind::divergence: {
      SparseMatrix m = disc.mass(SpaceKind::S) * disc.div;
      return {std::move(m), SpaceKind::S, SpaceKind::D};
    }
    case PairingKind::rot_rot: {
      SparseMatrix m = disc.rot.transpose() * disc.mass(SpaceKind::S) * disc.rot;
      return {std::move(m), SpaceKind::C, SpaceKind::C};
    }
    case PairingKind::perpgrad_velocity: {
      SparseMatrix m = disc.mass(SpaceKind::D) * disc.perp_grad;
      return {std::move(m), SpaceKind::D, SpaceKind::G};
    }
  }
  throw std::invalid_argument("derivative_pairing: unknown kind");
}

TrilinearOperator trilinear_scalar_frozen(const Field& s, const FunctionSpace& second,
                                          const FunctionSpace& third, int quad_points,
                                          int threads) {
  const FunctionSpace& ss = s.sp();
  if (is_vector_space(ss.kind()) || !is_vector_space(second.kind()) ||
      !is_vector_space(third.kind())) {
    throw std::invalid_argument("trilinear: expected (scalar, vector, vector) slots");
  }
  require_same_mesh(ss, second);
  require_same_mesh(ss, third);
  const TensorRule rule = TensorRule::gauss(points_or_default(ss, quad_points));
  const ElementEvaluator es(ss, rule), e2(second, rule), e3(third, rule);
  SparseMatrix m = assemble(
      third.dof_count(), second.dof_count(), ss.mesh().num_elements(), threads,
      [&](int e, Triplets& out) {
        const LocalBasis ls = es.evaluate(e);
        const LocalBasis l2 = e2.evaluate(e);
        const LocalBasis l3 = e3.evaluate(e);
        const Eigen::VectorXd sv = ls.comp[0].transpose() * s.local(e);
        const Eigen::VectorXd ws = ls.weights.cwiseProduct(sv);
        const Eigen::MatrixXd local = l3.comp[1] * ws.asDiagonal() * l2.comp[0].transpose() -
                                      l3.comp[0] * ws.asDiagonal() * l2.comp[1].transpose();
        scatter(local, third.element_dofs(e), second.element_dofs(e), out);
      });
  return {std::move(m), 0, third.kind(), second.kind()};
}

TrilinearOperator trilinear_vector_frozen(const Field& p, const FunctionSpace& first,
                                          const FunctionSpace& third, int quad_points,
                                          int threads) {
  const FunctionSpace& ps = p.sp();
  if (!is_vector_space(ps.kind()) || is_vector_space(first.kind()) ||
      !is_vector_space(third.kind())) {
    throw std::invalid_argument("trilinear: expected (scalar, vector, vector) slots");
  }
  require_same_mesh(ps, first);
  require_same_mesh(ps, third);
  const TensorRule rule = TensorRule::gauss(points_or_default(ps, quad_points));
  const ElementEvaluator ep(ps, rule), e1(first, rule), e3(third, rule);
  SparseMatrix m = assemble(
      first.dof_count(), third.dof_count(), ps.mesh().num_elements(), threads,
      [&](int e, Triplets& out) {
        const LocalBasis lp = ep.evaluate(e);
        const LocalBasis l1 = e1.evaluate(e);
        const LocalBasis l3 = e3.evaluate(e);
        const Eigen::MatrixXd pv = field_values(p, lp, e);
        const Eigen::VectorXd wpx = lp.weights.cwiseProduct(pv.col(0));
        const Eigen::VectorXd wpy = lp.weights.cwiseProduct(pv.col(1));
        const Eigen::MatrixXd local = l1.comp[0] * wpx.asDiagonal() * l3.comp[1].transpose() -
                                      l1.comp[0] * wpy.asDiagonal() * l3.comp[0].transpose();
        scatter(local, first.element_dofs(e), third.element_dofs(e), out);
      });
  return {std::move(m), 1, first.kind(), third.kind()};
}

double trilinear_value(const Field& alpha, const Field& beta, const Field& gamma,
                       int quad_points) {
  const bool sa = !is_vector_space(alpha.sp().kind());
  const bool sb = !is_vector_space(beta.sp().kind());
  const bool sc = !is_vector_space(gamma.sp().kind());
  if (sa + sb + sc != 1) {
    throw std::invalid_argument("trilinear: exactly one scalar argument expected");
  }
  require_same_mesh(alpha.sp(), beta.sp());
  require_same_mesh(alpha.sp(), gamma.sp());
  // T(s, p, q) = integral of s (p_x q_y - p_y q_x); slot permutations fix the sign.
  const Field& s = sa ? alpha : (sb ? beta : gamma);
  const Field& p = sa ? beta : (sb ? alpha : alpha);
  const Field& q = sa ? gamma : (sb ? gamma : beta);
  const double sign = sb ? -1.0 : 1.0;
  const TensorRule rule = TensorRule::gauss(points_or_default(s.sp(), quad_points));
  const ElementEvaluator es(s.sp(), rule), ep(p.sp(), rule), eq(q.sp(), rule);
  double total = 0.0;
  for (int e = 0; e < s.sp().mesh().num_elements(); ++e) {
    const LocalBasis ls = es.evaluate(e);
    const Eigen::MatrixXd sv = field_values(s, ls, e);
    const Eigen::MatrixXd pv = field_values(p, ep.evaluate(e), e);
    const Eigen::MatrixXd qv = field_values(q, eq.evaluate(e), e);
    const Eigen::ArrayXd cross =
        pv.col(0).array() * qv.col(1).array() - pv.col(1).array() * qv.col(0).array();
    total += (ls.weights.array() * sv.col(0).array() * cross).sum();
  }
  return sign * total;
}

Eigen::VectorXd load_vector(const FunctionSpace& space, const ScalarFunction& f,
                            int quad_points) {
  if (is_vector_space(space.kind())) {
    throw std::invalid_argument("load_vector: scalar data needs a scalar space");
  }
  const TensorRule rule = TensorRule::gauss(points_or_default(space, quad_points));
  const ElementEvaluator ev(space, rule);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(space.dof_count());
  for (int e = 0; e < space.mesh().num_elements(); ++e) {
    const LocalBasis lb = ev.evaluate(e);
    Eigen::VectorXd fw(lb.weights.size());
    for (int q = 0; q < fw.size(); ++q) fw[q] = lb.weights[q] * f(lb.points[q][0], lb.points[q][1]);
    const Eigen::VectorXd local = lb.comp[0] * fw;
    const auto dofs = space.element_dofs(e);
    for (std::size_t i = 0; i < dofs.size(); ++i) b[dofs[i]] += local[i];
  }
  return b;
}

Eigen::VectorXd load_vector(const FunctionSpace& space, const VectorFunction& f,
                            int quad_points) {
  if (!is_vector_space(space.kind())) {
    throw std::invalid_argument("load_vector: vector data needs a vector space");
  }
  const TensorRule rule = TensorRule::gauss(points_or_default(space, quad_points));
  const ElementEvaluator ev(space, rule);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(space.dof_count());
  for (int e = 0; e < space.mesh().num_elements(); ++e) {
    const LocalBasis lb = ev.evaluate(e);
    Eigen::VectorXd fx(lb.weights.size()), fy(lb.weights.size());
    for (int q = 0; q < fx.size(); ++q) {
      const Vec2 v = f(lb.points[q][0], lb.points[q][1]);
      fx[q] = lb.weights[q] * v[0];
      fy[q] = lb.weights[q] * v[1];
    }
    const Eigen::VectorXd local = lb.comp[0] * fx + lb.comp[1] * fy;
    const auto dofs = space.element_dofs(e);
    for (std::size_t i = 0; i < dofs.size(); ++i) b[dofs[i]] += local[i];
  }
  return b;
}

namespace {

void check_trace(const FunctionSpace& space, TraceKind kind) {
  const bool ok = (kind == TraceKind::scalar && space.kind() == SpaceKind::G) ||
                  (kind == TraceKind::normal && space.kind() == SpaceKind::D) ||
                  (kind == TraceKind::tangential && space.kind() == SpaceKind::C);
  if (!ok) {
    throw std::invalid_argument(std::string("boundary data: trace kind incompatible with space ") +
                                space_name(space.kind()));
  }
}

}  // namespace

Eigen::VectorXd boundary_functional(const FunctionSpace& space,
                                    const std::set<std::string>& labels,
                                    const ScalarFunction& data, TraceKind kind,
                                    int quad_points) {
  check_trace(space, kind);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(space.dof_count());
  if (!data) return b;
  const Mesh& mesh = space.mesh();
  const auto rule = gauss_legendre(std::max(quad_points, space.degree() + 3));
  const std::array<double, 1> lo{-1.0}, hi{1.0};
  for (const auto& label : labels) {
    const Side side = mesh.side_of(label);
    const bool vertical = side == Side::left || side == Side::right;
    const std::span<const double> fixed =
        (side == Side::left || side == Side::bottom) ? std::span<const double>(lo)
                                                     : std::span<const double>(hi);
    const ElementEvaluator ev = vertical ? ElementEvaluator(space, fixed, rule.points)
                                         : ElementEvaluator(space, rule.points, fixed);
    const auto n = side_normal(side);
    const auto t = side_tangent(side);
    for (const auto& face : mesh.boundary_faces(label)) {
      const LocalBasis lb = ev.evaluate(face.element);
      const auto [ex, ey] = mesh.element_coords(face.element);
      const double half = 0.5 * (vertical ? mesh.hy(ey) : mesh.hx(ex));
      const auto dofs = space.element_dofs(face.element);
      for (int q = 0; q < rule.size(); ++q) {
        const double g = data(lb.points[q][0], lb.points[q][1]) * rule.weights[q] * half;
        for (std::size_t i = 0; i < dofs.size(); ++i) {
          double tr;
          if (kind == TraceKind::scalar) {
            tr = lb.comp[0](i, q);
          } else {
            const auto& dir = kind == TraceKind::normal ? n : t;
            tr = lb.comp[0](i, q) * dir[0] + lb.comp[1](i, q) * dir[1];
          }
          if (tr != 0.0) b[dofs[i]] += g * tr;
        }
      }
    }
  }
  return b;
}

void EssentialConstraint::merge(const EssentialConstraint& other, int offset) {
  std::set<int> present(dofs.begin(), dofs.end());
  for (std::size_t i = 0; i < other.dofs.size(); ++i) {
    const int d = other.dofs[i] + offset;
    if (present.insert(d).second) {
      dofs.push_back(d);
      values.push_back(other.values[i]);
    }
  }
}

EssentialConstraint essential_values(const FunctionSpace& space,
                                     const std::set<std::string>& labels,
                                     const ScalarFunction& data, TraceKind kind) {
  check_trace(space, kind);
  EssentialConstraint out;
  const Mesh& mesh = space.mesh();
  const auto rule = gauss_legendre(12);
  for (const auto& label : labels) {
    const Side side = mesh.side_of(label);
    const bool vertical = side == Side::left || side == Side::right;
    const TraceDofs tr = trace_dofs(space, label, kind);
    const double fixed = vertical ? (side == Side::left ? mesh.bounds().x_min : mesh.bounds().x_max)
                                  : (side == Side::bottom ? mesh.bounds().y_min
                                                          : mesh.bounds().y_max);
    EssentialConstraint part;
    for (std::size_t k = 0; k < tr.dofs.size(); ++k) {
      const int idx = static_cast<int>(k);
      double value = 0.0;
      if (data) {
        if (kind == TraceKind::scalar) {
          const double s = vertical ? space.lattice_coordinate_y(idx)
                                    : space.lattice_coordinate_x(idx);
          value = vertical ? data(fixed, s) : data(s, fixed);
        } else {
          const double a = vertical ? space.lattice_coordinate_y(idx)
                                    : space.lattice_coordinate_x(idx);
          const double b = vertical ? space.lattice_coordinate_y(idx + 1)
                                    : space.lattice_coordinate_x(idx + 1);
          const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
          double integral = 0.0;
          for (int q = 0; q < rule.size(); ++q) {
            const double s = mid + half * rule.points[q];
            integral += rule.weights[q] * (vertical ? data(fixed, s) : data(s, fixed));
          }
          value = tr.weights[k] * integral * half;
        }
      }
      part.dofs.push_back(tr.dofs[k]);
      part.values.push_back(value);
    }
    out.merge(part);
  }
  return out;
}

void essential_bc_apply(SparseMatrix& matrix, Eigen::VectorXd& rhs,
                        const EssentialConstraint& constraint) {
  if (constraint.empty()) return;
  const int n = static_cast<int>(matrix.rows());
  std::vector<char> mark(n, 0);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < constraint.dofs.size(); ++i) {
    mark[constraint.dofs[i]] = 1;
    g[constraint.dofs[i]] = constraint.values[i];
  }
  rhs -= matrix * g;
  matrix.prune([&](const Eigen::Index& r, const Eigen::Index& c, const double&) {
    return !mark[r] && !mark[c];
  });
  std::vector<Eigen::Triplet<double>> diag;
  for (int d : constraint.dofs) {
    diag.emplace_back(d, d, 1.0);
    rhs[d] = g[d];
  }
  SparseMatrix id(n, n);
  id.setFromTriplets(diag.begin(), diag.end());
  matrix += id;
  matrix.makeCompressed();
}

}  // namespace mhd
