#pragma once

/// @file assembly.hpp
/// @brief Mass matrices, derivative pairings, trilinear operators, load
/// vectors, boundary functionals and essential-condition elimination.

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "mhd/derham.hpp"

namespace mhd {

struct AssemblyOptions {
  /// Gauss points per direction for element integrals; 0 selects the default.
  int quad_points = 0;
  /// Worker threads for element loops; 0 reads MHD_THREADS, else hardware concurrency.
  int threads = 0;
};

/// Resolves a requested thread count (see AssemblyOptions::threads).
int resolve_threads(int requested);

struct SystemMatrix {
  SparseMatrix matrix;
  SpaceKind rows;
  SpaceKind cols;
};

/// Both 2D complexes on one mesh at one degree, with their incidence and
/// mass matrices.
class Discretization {
public:
  Discretization(std::shared_ptr<const Mesh> mesh, int degree, AssemblyOptions options = {});

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  int degree() const { return degree_; }
  int quad_points() const { return quad_points_; }
  int threads() const { return threads_; }
  const TensorRule& rule() const { return rule_; }

  const SpacePtr& space(SpaceKind kind) const;
  const SparseMatrix& mass(SpaceKind kind) const;

  const SpacePtr G, C, D, S;
  const SparseMatrix grad;       ///< G -> C
  const SparseMatrix rot;        ///< C -> S
  const SparseMatrix perp_grad;  ///< G -> D
  const SparseMatrix div;        ///< D -> S

private:
  std::shared_ptr<const Mesh> mesh_;
  int degree_;
  int quad_points_;
  int threads_;
  TensorRule rule_;
  std::array<SparseMatrix, 4> mass_;
};

using DiscretizationPtr = std::shared_ptr<const Discretization>;

DiscretizationPtr build_discretization(std::shared_ptr<const Mesh> mesh, int degree,
                                       AssemblyOptions options = {});

/// L2 Gram matrix of a space.
SystemMatrix mass_matrix(const FunctionSpace& space, int quad_points = 0, int threads = 1);

enum class PairingKind {
  velocity_perpgrad,  ///< <u, perp-grad w>: rows G, cols D
  divergence,         ///< <div u, q>: rows S, cols D
  rot_rot,            ///< <rot H, rot b>: rows C, cols C
  perpgrad_velocity,  ///< <perp-grad w, v>: rows D, cols G
};

/// Derivative pairings as incidence-times-mass products.
SystemMatrix derivative_pairing(const Discretization& disc, PairingKind kind);

/// a(s, p, q) = integral of s (p_x q_y - p_y q_x), the 2D form of <s x p, q>
/// with one scalar slot.
struct TrilinearOperator {
  SparseMatrix matrix;
  /// Position (0, 1 or 2) of the frozen argument.
  int frozen_slot;
  SpaceKind rows;
  SpaceKind cols;
};

/// Frozen scalar s in slot 0: matrix(i, j) = a(s, phi_j, psi_i), with phi from
/// @p second and psi from @p third.
TrilinearOperator trilinear_scalar_frozen(const Field& s, const FunctionSpace& second,
                                          const FunctionSpace& third, int quad_points,
                                          int threads = 1);

/// Frozen vector p in slot 1: matrix(i, j) = a(sigma_i, p, phi_j), with sigma
/// from the scalar space @p first and phi from @p third.
TrilinearOperator trilinear_vector_frozen(const Field& p, const FunctionSpace& first,
                                          const FunctionSpace& third, int quad_points,
                                          int threads = 1);

/// a(alpha, beta, gamma) = <alpha x beta, gamma> for one scalar and two vector
/// fields in any slot order.
double trilinear_value(const Field& alpha, const Field& beta, const Field& gamma,
                       int quad_points);

/// <f, phi_i> for every basis function of a scalar (G, S) or vector (C, D) space.
Eigen::VectorXd load_vector(const FunctionSpace& space, const ScalarFunction& f,
                            int quad_points);
Eigen::VectorXd load_vector(const FunctionSpace& space, const VectorFunction& f,
                            int quad_points);

/// Integral over the labelled sides of data times the trace of each basis
/// function: scalar trace on G, normal trace on D, ccw tangential trace on C.
Eigen::VectorXd boundary_functional(const FunctionSpace& space,
                                    const std::set<std::string>& labels,
                                    const ScalarFunction& data, TraceKind kind,
                                    int quad_points = 0);

struct EssentialConstraint {
  std::vector<int> dofs;
  std::vector<double> values;

  bool empty() const { return dofs.empty(); }
  /// Appends entries of @p other shifted by @p offset, skipping dofs already present.
  void merge(const EssentialConstraint& other, int offset = 0);
};

/// Degree-of-freedom values realising boundary trace data: nodal values on G,
/// signed edge integrals of the normal (D) or ccw tangential (C) component.
EssentialConstraint essential_values(const FunctionSpace& space,
                                     const std::set<std::string>& labels,
                                     const ScalarFunction& data, TraceKind kind);

/// Symmetric elimination: rhs -= A g, constrained rows and columns replaced by
/// identity, rhs set to the prescribed values.
void essential_bc_apply(SparseMatrix& matrix, Eigen::VectorXd& rhs,
                        const EssentialConstraint& constraint);

}  // namespace mhd
