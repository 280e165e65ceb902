#include "mhd/derham.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace mhd {

char space_name(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::G: return 'G';
    case SpaceKind::C: return 'C';
    case SpaceKind::D: return 'D';
    case SpaceKind::S: return 'S';
  }
  return '?';
}

FunctionSpace::FunctionSpace(std::shared_ptr<const Mesh> mesh, SpaceKind kind, int degree)
    : mesh_(std::move(mesh)), kind_(kind), degree_(degree), basis_(degree) {
  if (!mesh_) throw std::invalid_argument("function space: null mesh");
  mx_ = mesh_->kx() * degree;
  my_ = mesh_->ky() * degree;
  npx_ = mesh_->periodic_x() ? mx_ : mx_ + 1;
  npy_ = mesh_->periodic_y() ? my_ : my_ + 1;
  build_numbering();
}

int FunctionSpace::local_x_count() const {
  return is_vector_space(kind_) ? degree_ * (degree_ + 1) : 0;
}

int FunctionSpace::node_index(int i, int j) const {
  if (i >= npx_) i -= mx_;
  if (j >= npy_) j -= my_;
  return j * npx_ + i;
}

int FunctionSpace::x_edge_index(int i, int j) const {
  if (j >= npy_) j -= my_;
  return j * mx_ + i;
}

int FunctionSpace::y_edge_index(int i, int j) const {
  if (i >= npx_) i -= mx_;
  return mx_ * npy_ + j * npx_ + i;
}

int FunctionSpace::x_flux_index(int i, int j) const {
  if (i >= npx_) i -= mx_;
  return j * npx_ + i;
}

int FunctionSpace::y_flux_index(int i, int j) const {
  if (j >= npy_) j -= my_;
  return npx_ * my_ + j * mx_ + i;
}

double FunctionSpace::lattice_coordinate_x(int i) const {
  const int n = degree_;
  int ex = std::min(i / n, mesh_->kx() - 1);
  const int li = i - ex * n;
  const double x0 = mesh_->edges_x()[ex];
  return x0 + 0.5 * (basis_.nodes()[li] + 1.0) * mesh_->hx(ex);
}

double FunctionSpace::lattice_coordinate_y(int j) const {
  const int n = degree_;
  int ey = std::min(j / n, mesh_->ky() - 1);
  const int lj = j - ey * n;
  const double y0 = mesh_->edges_y()[ey];
  return y0 + 0.5 * (basis_.nodes()[lj] + 1.0) * mesh_->hy(ey);
}

std::array<double, 2> FunctionSpace::lattice_point(int i, int j) const {
  return {lattice_coordinate_x(i), lattice_coordinate_y(j)};
}

void FunctionSpace::build_numbering() {
  const int n = degree_;
  switch (kind_) {
    case SpaceKind::G:
      dof_count_ = npx_ * npy_;
      local_count_ = (n + 1) * (n + 1);
      break;
    case SpaceKind::C:
      dof_count_ = mx_ * npy_ + npx_ * my_;
      local_count_ = 2 * n * (n + 1);
      break;
    case SpaceKind::D:
      dof_count_ = npx_ * my_ + mx_ * npy_;
      local_count_ = 2 * n * (n + 1);
      break;
    case SpaceKind::S:
      dof_count_ = mx_ * my_;
      local_count_ = n * n;
      break;
  }
  const int ne = mesh_->num_elements();
  l2g_.resize(static_cast<std::size_t>(ne) * local_count_);
  for (int e = 0; e < ne; ++e) {
    const auto [ex, ey] = mesh_->element_coords(e);
    const int i0 = ex * n, j0 = ey * n;
    int* out = l2g_.data() + static_cast<std::size_t>(e) * local_count_;
    int c = 0;
    switch (kind_) {
      case SpaceKind::G:
        for (int j = 0; j <= n; ++j)
          for (int i = 0; i <= n; ++i) out[c++] = node_index(i0 + i, j0 + j);
        break;
      case SpaceKind::S:
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) out[c++] = cell_index(i0 + i, j0 + j);
        break;
      case SpaceKind::C:
        for (int j = 0; j <= n; ++j)
          for (int i = 0; i < n; ++i) out[c++] = x_edge_index(i0 + i, j0 + j);
        for (int j = 0; j < n; ++j)
          for (int i = 0; i <= n; ++i) out[c++] = y_edge_index(i0 + i, j0 + j);
        break;
      case SpaceKind::D:
        for (int j = 0; j < n; ++j)
          for (int i = 0; i <= n; ++i) out[c++] = x_flux_index(i0 + i, j0 + j);
        for (int j = 0; j <= n; ++j)
          for (int i = 0; i < n; ++i) out[c++] = y_flux_index(i0 + i, j0 + j);
        break;
    }
  }
}

SpacePtr build_space(std::shared_ptr<const Mesh> mesh, SpaceKind kind, int degree) {
  if (degree < 1) throw std::invalid_argument("build_space: degree must be >= 1");
  return std::make_shared<const FunctionSpace>(std::move(mesh), kind, degree);
}

Field::Field(SpacePtr s, TimeTag t)
    : space(std::move(s)), coeffs(Eigen::VectorXd::Zero(space->dof_count())), tag(t) {}

Field::Field(SpacePtr s, Eigen::VectorXd c, TimeTag t)
    : space(std::move(s)), coeffs(std::move(c)), tag(t) {
  if (coeffs.size() != space->dof_count()) {
    throw std::invalid_argument("field: coefficient length does not match the space");
  }
}

Eigen::VectorXd Field::local(int element) const {
  const auto dofs = space->element_dofs(element);
  Eigen::VectorXd out(dofs.size());
  for (std::size_t i = 0; i < dofs.size(); ++i) out[i] = coeffs[dofs[i]];
  return out;
}

namespace {

void require_compatible(const FunctionSpace& a, const FunctionSpace& b) {
  if (&a.mesh() != &b.mesh() || a.degree() != b.degree()) {
    throw std::invalid_argument("incidence: spaces live on different meshes or degrees");
  }
}

}  // namespace

IncidenceMatrix incidence(const FunctionSpace& from, const FunctionSpace& to) {
  require_compatible(from, to);
  const int mx = from.lattice_x(), my = from.lattice_y();
  const int npx = from.nodes_x(), npy = from.nodes_y();
  std::vector<Eigen::Triplet<int>> t;
  const FunctionSpace& f = from;
  const FunctionSpace& g = to;
  const auto pair = std::make_pair(from.kind(), to.kind());
  if (pair == std::make_pair(SpaceKind::G, SpaceKind::C)) {
    for (int j = 0; j < npy; ++j)
      for (int i = 0; i < mx; ++i) {
        const int r = g.x_edge_index(i, j);
        t.emplace_back(r, f.node_index(i + 1, j), 1);
        t.emplace_back(r, f.node_index(i, j), -1);
      }
    for (int j = 0; j < my; ++j)
      for (int i = 0; i < npx; ++i) {
        const int r = g.y_edge_index(i, j);
        t.emplace_back(r, f.node_index(i, j + 1), 1);
        t.emplace_back(r, f.node_index(i, j), -1);
      }
  } else if (pair == std::make_pair(SpaceKind::C, SpaceKind::S)) {
    for (int j = 0; j < my; ++j)
      for (int i = 0; i < mx; ++i) {
        const int r = g.cell_index(i, j);
        t.emplace_back(r, f.x_edge_index(i, j), 1);
        t.emplace_back(r, f.y_edge_index(i + 1, j), 1);
        t.emplace_back(r, f.x_edge_index(i, j + 1), -1);
        t.emplace_back(r, f.y_edge_index(i, j), -1);
      }
  } else if (pair == std::make_pair(SpaceKind::G, SpaceKind::D)) {
    for (int j = 0; j < my; ++j)
      for (int i = 0; i < npx; ++i) {
        const int r = g.x_flux_index(i, j);
        t.emplace_back(r, f.node_index(i, j + 1), 1);
        t.emplace_back(r, f.node_index(i, j), -1);
      }
    for (int j = 0; j < npy; ++j)
      for (int i = 0; i < mx; ++i) {
        const int r = g.y_flux_index(i, j);
        t.emplace_back(r, f.node_index(i + 1, j), -1);
        t.emplace_back(r, f.node_index(i, j), 1);
      }
  } else if (pair == std::make_pair(SpaceKind::D, SpaceKind::S)) {
    for (int j = 0; j < my; ++j)
      for (int i = 0; i < mx; ++i) {
        const int r = g.cell_index(i, j);
        t.emplace_back(r, f.x_flux_index(i + 1, j), 1);
        t.emplace_back(r, f.x_flux_index(i, j), -1);
        t.emplace_back(r, f.y_flux_index(i, j + 1), 1);
        t.emplace_back(r, f.y_flux_index(i, j), -1);
      }
  } else {
    throw std::invalid_argument(std::string("incidence: unsupported pair (") +
                                space_name(from.kind()) + ", " + space_name(to.kind()) + ")");
  }
  IncidenceMatrix m{Eigen::SparseMatrix<int>(to.dof_count(), from.dof_count()), from.kind(),
                    to.kind()};
  m.entries.setFromTriplets(t.begin(), t.end());
  m.entries.prune(0);
  m.entries.makeCompressed();
  return m;
}

TraceDofs trace_dofs(const FunctionSpace& space, std::string_view label, TraceKind kind) {
  const Side side = space.mesh().side_of(label);
  const int mx = space.lattice_x(), my = space.lattice_y();
  const int npx = space.nodes_x(), npy = space.nodes_y();
  const bool vertical = side == Side::left || side == Side::right;
  const auto n = side_normal(side);
  const auto tg = side_tangent(side);
  TraceDofs out;
  const bool ok = (kind == TraceKind::scalar && space.kind() == SpaceKind::G) ||
                  (kind == TraceKind::normal && space.kind() == SpaceKind::D) ||
                  (kind == TraceKind::tangential && space.kind() == SpaceKind::C);
  if (!ok) {
    throw std::invalid_argument(std::string("trace_dofs: trace kind incompatible with space ") +
                                space_name(space.kind()));
  }
  if (space.kind() == SpaceKind::G) {
    if (vertical) {
      const int i = side == Side::left ? 0 : mx;
      for (int j = 0; j < npy; ++j) out.dofs.push_back(space.node_index(i, j));
    } else {
      const int j = side == Side::bottom ? 0 : my;
      for (int i = 0; i < npx; ++i) out.dofs.push_back(space.node_index(i, j));
    }
    out.weights.assign(out.dofs.size(), 1.0);
  } else if (space.kind() == SpaceKind::D) {
    if (vertical) {
      const int i = side == Side::left ? 0 : mx;
      for (int j = 0; j < my; ++j) out.dofs.push_back(space.x_flux_index(i, j));
      out.weights.assign(out.dofs.size(), n[0]);
    } else {
      const int j = side == Side::bottom ? 0 : my;
      for (int i = 0; i < mx; ++i) out.dofs.push_back(space.y_flux_index(i, j));
      out.weights.assign(out.dofs.size(), n[1]);
    }
  } else {
    if (vertical) {
      const int i = side == Side::left ? 0 : mx;
      for (int j = 0; j < my; ++j) out.dofs.push_back(space.y_edge_index(i, j));
      out.weights.assign(out.dofs.size(), tg[1]);
    } else {
      const int j = side == Side::bottom ? 0 : my;
      for (int i = 0; i < mx; ++i) out.dofs.push_back(space.x_edge_index(i, j));
      out.weights.assign(out.dofs.size(), tg[0]);
    }
  }
  return out;
}

namespace {

constexpr int kProjectionPoints = 12;

double line_integral(const QuadratureRule& rule, double a, double b,
                     const std::function<double(double)>& g) {
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double s = 0.0;
  for (int q = 0; q < rule.size(); ++q) s += rule.weights[q] * g(mid + half * rule.points[q]);
  return s * half;
}

}  // namespace

Field project(SpacePtr space, const ScalarFunction& f, TimeTag tag) {
  const FunctionSpace& sp = *space;
  Field out(space, tag);
  const int mx = sp.lattice_x(), my = sp.lattice_y();
  if (sp.kind() == SpaceKind::G) {
    for (int j = 0; j < sp.nodes_y(); ++j)
      for (int i = 0; i < sp.nodes_x(); ++i) {
        const auto p = sp.lattice_point(i, j);
        out.coeffs[sp.node_index(i, j)] = f(p[0], p[1]);
      }
  } else if (sp.kind() == SpaceKind::S) {
    const auto rule = gauss_legendre(kProjectionPoints);
    for (int j = 0; j < my; ++j)
      for (int i = 0; i < mx; ++i) {
        const double x0 = sp.lattice_coordinate_x(i), x1 = sp.lattice_coordinate_x(i + 1);
        const double y0 = sp.lattice_coordinate_y(j), y1 = sp.lattice_coordinate_y(j + 1);
        out.coeffs[sp.cell_index(i, j)] = line_integral(rule, y0, y1, [&](double y) {
          return line_integral(rule, x0, x1, [&](double x) { return f(x, y); });
        });
      }
  } else {
    throw std::invalid_argument("project: scalar function requires a G or S space");
  }
  return out;
}

Field project(SpacePtr space, const VectorFunction& f, TimeTag tag) {
  const FunctionSpace& sp = *space;
  if (!is_vector_space(sp.kind())) {
    throw std::invalid_argument("project: vector function requires a C or D space");
  }
  Field out(space, tag);
  const auto rule = gauss_legendre(kProjectionPoints);
  const int mx = sp.lattice_x(), my = sp.lattice_y();
  const int npx = sp.nodes_x(), npy = sp.nodes_y();
  for (int j = 0; j < npy; ++j) {
    const double y = sp.lattice_coordinate_y(j);
    for (int i = 0; i < mx; ++i) {
      const double x0 = sp.lattice_coordinate_x(i), x1 = sp.lattice_coordinate_x(i + 1);
      const int comp = sp.kind() == SpaceKind::C ? 0 : 1;
      const int idx = sp.kind() == SpaceKind::C ? sp.x_edge_index(i, j) : sp.y_flux_index(i, j);
      out.coeffs[idx] = line_integral(rule, x0, x1, [&](double x) { return f(x, y)[comp]; });
    }
  }
  for (int j = 0; j < my; ++j) {
    const double y0 = sp.lattice_coordinate_y(j), y1 = sp.lattice_coordinate_y(j + 1);
    for (int i = 0; i < npx; ++i) {
      const double x = sp.lattice_coordinate_x(i);
      const int comp = sp.kind() == SpaceKind::C ? 1 : 0;
      const int idx = sp.kind() == SpaceKind::C ? sp.y_edge_index(i, j) : sp.x_flux_index(i, j);
      out.coeffs[idx] = line_integral(rule, y0, y1, [&](double y) { return f(x, y)[comp]; });
    }
  }
  return out;
}

TensorRule TensorRule::gauss(int npoints) {
  const auto r = gauss_legendre(npoints);
  return {r.points, r.points, r.weights, r.weights};
}

ElementEvaluator::ElementEvaluator(const FunctionSpace& space, std::span<const double> xi,
                                   std::span<const double> eta, std::span<const double> wx,
                                   std::span<const double> wy)
    : space_(&space),
      xi_(xi.begin(), xi.end()),
      eta_(eta.begin(), eta.end()),
      wx_(wx.begin(), wx.end()),
      wy_(wy.begin(), wy.end()) {
  tx_ = space.basis().tabulate(xi_);
  ty_ = space.basis().tabulate(eta_);
}

LocalBasis ElementEvaluator::evaluate(int element, bool derivatives) const {
  const FunctionSpace& sp = *space_;
  const Mesh& mesh = sp.mesh();
  const auto [ex, ey] = mesh.element_coords(element);
  const double hx = mesh.hx(ex), hy = mesh.hy(ey);
  const double sx = 2.0 / hx, sy = 2.0 / hy;
  const double x0 = mesh.edges_x()[ex], y0 = mesh.edges_y()[ey];
  const int n = sp.degree();
  const int nqx = static_cast<int>(xi_.size()), nqy = static_cast<int>(eta_.size());
  const int np = nqx * nqy;

  LocalBasis lb;
  lb.points.resize(np);
  for (int qy = 0; qy < nqy; ++qy)
    for (int qx = 0; qx < nqx; ++qx)
      lb.points[qy * nqx + qx] = {x0 + 0.5 * (xi_[qx] + 1.0) * hx,
                                  y0 + 0.5 * (eta_[qy] + 1.0) * hy};
  if (!wx_.empty() && !wy_.empty()) {
    lb.weights.resize(np);
    const double jac = 0.25 * hx * hy;
    for (int qy = 0; qy < nqy; ++qy)
      for (int qx = 0; qx < nqx; ++qx) lb.weights[qy * nqx + qx] = wx_[qx] * wy_[qy] * jac;
  }

  const int nloc = sp.local_dof_count();
  for (int c = 0; c < 2; ++c) {
    lb.comp[c] = Eigen::MatrixXd::Zero(nloc, np);
    if (derivatives) {
      lb.d_dx[c] = Eigen::MatrixXd::Zero(nloc, np);
      lb.d_dy[c] = Eigen::MatrixXd::Zero(nloc, np);
    }
    if (!is_vector_space(sp.kind())) break;
  }

  // Fills row r of component c with f(xi) g(eta) and optional derivatives.
  auto fill = [&](int c, int r, const Eigen::MatrixXd& fx, const Eigen::MatrixXd& dfx, int a,
                  double ax, const Eigen::MatrixXd& gy, const Eigen::MatrixXd& dgy, int b,
                  double by) {
    for (int qy = 0; qy < nqy; ++qy) {
      const double gv = by * gy(b, qy);
      for (int qx = 0; qx < nqx; ++qx) lb.comp[c](r, qy * nqx + qx) = ax * fx(a, qx) * gv;
    }
    if (derivatives) {
      for (int qy = 0; qy < nqy; ++qy) {
        const double gv = by * gy(b, qy);
        const double dgv = by * sy * dgy(b, qy);
        for (int qx = 0; qx < nqx; ++qx) {
          lb.d_dx[c](r, qy * nqx + qx) = ax * sx * dfx(a, qx) * gv;
          lb.d_dy[c](r, qy * nqx + qx) = ax * fx(a, qx) * dgv;
        }
      }
    }
  };

  int r = 0;
  switch (sp.kind()) {
    case SpaceKind::G:
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
          fill(0, r++, tx_.nodal, tx_.nodal_d, i, 1.0, ty_.nodal, ty_.nodal_d, j, 1.0);
      break;
    case SpaceKind::S:
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          fill(0, r++, tx_.edge, tx_.edge_d, i, sx, ty_.edge, ty_.edge_d, j, sy);
      break;
    case SpaceKind::C:
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i < n; ++i)
          fill(0, r++, tx_.edge, tx_.edge_d, i, sx, ty_.nodal, ty_.nodal_d, j, 1.0);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i <= n; ++i)
          fill(1, r++, tx_.nodal, tx_.nodal_d, i, 1.0, ty_.edge, ty_.edge_d, j, sy);
      break;
    case SpaceKind::D:
      for (int j = 0; j < n; ++j)
        for (int i = 0; i <= n; ++i)
          fill(0, r++, tx_.nodal, tx_.nodal_d, i, 1.0, ty_.edge, ty_.edge_d, j, sy);
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i < n; ++i)
          fill(1, r++, tx_.edge, tx_.edge_d, i, sx, ty_.nodal, ty_.nodal_d, j, 1.0);
      break;
  }
  return lb;
}

namespace {

template <class Accumulate>
void for_containing_elements(const FunctionSpace& sp, double x, double y, Accumulate acc) {
  const Mesh& mesh = sp.mesh();
  const auto cx = mesh.locate_x(x);
  const auto cy = mesh.locate_y(y);
  for (int ey : cy)
    for (int ex : cx) {
      const double xi = std::clamp(2.0 * (x - mesh.edges_x()[ex]) / mesh.hx(ex) - 1.0, -1.0, 1.0);
      const double eta =
          std::clamp(2.0 * (y - mesh.edges_y()[ey]) / mesh.hy(ey) - 1.0, -1.0, 1.0);
      const std::array<double, 1> px{xi}, py{eta};
      ElementEvaluator ev(sp, px, py);
      acc(mesh.element_index(ex, ey), ev.evaluate(mesh.element_index(ex, ey)));
    }
}

}  // namespace

double evaluate_scalar(const Field& field, double x, double y) {
  if (is_vector_space(field.sp().kind())) {
    throw std::invalid_argument("evaluate_scalar: field is vector valued");
  }
  double sum = 0.0;
  int count = 0;
  for_containing_elements(field.sp(), x, y, [&](int e, const LocalBasis& lb) {
    sum += lb.comp[0].col(0).dot(field.local(e));
    ++count;
  });
  return sum / count;
}

Vec2 evaluate_vector(const Field& field, double x, double y) {
  if (!is_vector_space(field.sp().kind())) {
    throw std::invalid_argument("evaluate_vector: field is scalar valued");
  }
  Vec2 sum{0.0, 0.0};
  int count = 0;
  for_containing_elements(field.sp(), x, y, [&](int e, const LocalBasis& lb) {
    const Eigen::VectorXd c = field.local(e);
    sum[0] += lb.comp[0].col(0).dot(c);
    sum[1] += lb.comp[1].col(0).dot(c);
    ++count;
  });
  return {sum[0] / count, sum[1] / count};
}

}  // namespace mhd
