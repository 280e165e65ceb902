#pragma once

/// @file derham.hpp
/// @brief The four discrete spaces G/C/D/S of the 2D de Rham complexes,
/// fields living in them, incidence matrices, traces and projections.
///
/// Fields per space in 2D: G holds nodal scalars (vorticity), C holds
/// tangentially continuous vectors (magnetic field), D holds normally
/// continuous vectors (velocity) and S holds cellwise scalars (pressure,
/// current density).

#include <array>
#include <functional>
#include <memory>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "mhd/basis.hpp"
#include "mhd/mesh.hpp"

namespace mhd {

using Vec2 = std::array<double, 2>;
using ScalarFunction = std::function<double(double x, double y)>;
using VectorFunction = std::function<Vec2(double x, double y)>;
using SparseMatrix = Eigen::SparseMatrix<double>;

enum class SpaceKind { G, C, D, S };

char space_name(SpaceKind kind);
inline bool is_vector_space(SpaceKind kind) {
  return kind == SpaceKind::C || kind == SpaceKind::D;
}

enum class TraceKind { scalar, normal, tangential };

/// Global numbering (Mx = Kx N, My = Ky N, npx = Mx or Mx+1 when periodic or not):
///   G: node (I,J)                        -> J npx + I
///   C: x-edge (I,J), I<Mx, J node        -> J Mx + I
///      y-edge (I,J), I node, J<My        -> Mx npy + J npx + I
///   D: x-flux across vertical edge (I,J)  -> J npx + I
///      y-flux across horizontal edge (I,J)-> npx My + J Mx + I
///   S: cell (I,J)                        -> J Mx + I
/// Every edge degree of freedom is oriented along +x or +y.
///
/// Local numbering inside an element, with (i,j) the local lattice indices:
///   G: j (N+1) + i;  S: j N + i;
///   C: x-part j N + i (i edge, j node), then y-part N(N+1) + j (N+1) + i;
///   D: x-part j (N+1) + i (i node, j edge), then y-part N(N+1) + j N + i.
class FunctionSpace {
public:
  FunctionSpace(std::shared_ptr<const Mesh> mesh, SpaceKind kind, int degree);

  SpaceKind kind() const { return kind_; }
  int degree() const { return degree_; }
  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  const SpectralBasis1D& basis() const { return basis_; }
  int dof_count() const { return dof_count_; }
  int local_dof_count() const { return local_count_; }
  /// Number of local x-component functions (vector spaces); 0 for scalar spaces.
  int local_x_count() const;
  std::span<const int> element_dofs(int element) const {
    return {l2g_.data() + static_cast<std::size_t>(element) * local_count_,
            static_cast<std::size_t>(local_count_)};
  }

  int lattice_x() const { return mx_; }
  int lattice_y() const { return my_; }
  int nodes_x() const { return npx_; }
  int nodes_y() const { return npy_; }

  int node_index(int i, int j) const;
  int x_edge_index(int i, int j) const;
  int y_edge_index(int i, int j) const;
  int x_flux_index(int i, int j) const;
  int y_flux_index(int i, int j) const;
  int cell_index(int i, int j) const { return j * mx_ + i; }

  /// Global lattice coordinate of element-local node/edge index per direction.
  std::array<double, 2> lattice_point(int i, int j) const;
  double lattice_coordinate_x(int i) const;
  double lattice_coordinate_y(int j) const;

private:
  void build_numbering();

  std::shared_ptr<const Mesh> mesh_;
  SpaceKind kind_;
  int degree_;
  SpectralBasis1D basis_;
  int mx_, my_, npx_, npy_;
  int dof_count_ = 0;
  int local_count_ = 0;
  std::vector<int> l2g_;
};

using SpacePtr = std::shared_ptr<const FunctionSpace>;

SpacePtr build_space(std::shared_ptr<const Mesh> mesh, SpaceKind kind, int degree);

/// Step index times two: 2k for integer tags, 2k+1 for k+1/2.
struct TimeTag {
  int halves = 0;
  static TimeTag integer(int k) { return {2 * k}; }
  static TimeTag half_after(int k) { return {2 * k + 1}; }
  double value() const { return 0.5 * halves; }
  bool operator==(const TimeTag&) const = default;
};

struct Field {
  SpacePtr space;
  Eigen::VectorXd coeffs;
  TimeTag tag;

  Field() = default;
  explicit Field(SpacePtr s, TimeTag t = {});
  Field(SpacePtr s, Eigen::VectorXd c, TimeTag t = {});

  const FunctionSpace& sp() const { return *space; }
  Eigen::VectorXd local(int element) const;
};

struct IncidenceMatrix {
  Eigen::SparseMatrix<int> entries;
  SpaceKind from;
  SpaceKind to;

  SparseMatrix as_real() const { return entries.cast<double>(); }
};

/// Topological derivative between consecutive spaces: (G,C) grad, (C,S) rot,
/// (G,D) perp-grad with perp-grad w = (dw/dy, -dw/dx), (D,S) div.
IncidenceMatrix incidence(const FunctionSpace& from, const FunctionSpace& to);

struct TraceDofs {
  std::vector<int> dofs;
  /// Orientation weight mapping the dof onto the outward/ccw trace.
  std::vector<double> weights;
};

/// Degrees of freedom carrying the trace of @p kind on the labelled side,
/// ordered along the side by increasing coordinate.
TraceDofs trace_dofs(const FunctionSpace& space, std::string_view label, TraceKind kind);

Field project(SpacePtr space, const ScalarFunction& f, TimeTag tag = {});
Field project(SpacePtr space, const VectorFunction& f, TimeTag tag = {});

/// Tensor product of Gauss points on the reference square, x-index fastest.
struct TensorRule {
  std::vector<double> xi;
  std::vector<double> eta;
  std::vector<double> wx;
  std::vector<double> wy;

  int size() const { return static_cast<int>(xi.size() * eta.size()); }
  static TensorRule gauss(int npoints);
};

/// Physical basis values of one element at the points of a tensor rule.
/// Rows are local dofs, columns quadrature points (x fastest). Scalar spaces
/// fill comp[0] only; derivatives are physical and filled on request.
struct LocalBasis {
  std::array<Eigen::MatrixXd, 2> comp;
  std::array<Eigen::MatrixXd, 2> d_dx;
  std::array<Eigen::MatrixXd, 2> d_dy;
  /// Physical quadrature weights (including the Jacobian).
  Eigen::VectorXd weights;
  std::vector<Vec2> points;
};

/// Reference tables for one space and point set, reused across elements.
class ElementEvaluator {
public:
  ElementEvaluator(const FunctionSpace& space, std::span<const double> xi,
                   std::span<const double> eta, std::span<const double> wx = {},
                   std::span<const double> wy = {});
  ElementEvaluator(const FunctionSpace& space, const TensorRule& rule)
      : ElementEvaluator(space, rule.xi, rule.eta, rule.wx, rule.wy) {}

  LocalBasis evaluate(int element, bool derivatives = false) const;

private:
  const FunctionSpace* space_;
  std::vector<double> xi_, eta_, wx_, wy_;
  BasisTable tx_, ty_;
};

/// Point evaluation; points on element interfaces average the neighbouring
/// element values.
double evaluate_scalar(const Field& field, double x, double y);
Vec2 evaluate_vector(const Field& field, double x, double y);

}  // namespace mhd
