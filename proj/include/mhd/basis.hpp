#pragma once

/// @file basis.hpp
/// @brief One-dimensional mimetic spectral basis (GLL nodal and edge
/// polynomials) and Gauss-Legendre quadrature on [-1, 1].

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mhd {

struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(points.size()); }
  /// Highest polynomial degree integrated exactly.
  int exactness() const { return 2 * size() - 1; }
};

/// Gauss-Legendre rule with @p npoints points.
QuadratureRule gauss_legendre(int npoints);

/// Gauss-Legendre rule selected by its number of points; exact through degree 2*order-1.
QuadratureRule quadrature(int order);

/// Gauss-Lobatto-Legendre nodes and weights of degree N (N+1 points).
QuadratureRule gll_nodes(int degree);

/// Legendre polynomial P_n and its derivative at x.
std::pair<double, double> legendre(int n, double x);

/// Default number of Gauss points per direction for element integrals at degree N.
int default_quadrature_points(int degree);

/// Basis values at a set of points, one row per basis function and one
/// column per point.
struct BasisTable {
  Eigen::MatrixXd nodal;
  Eigen::MatrixXd nodal_d;
  Eigen::MatrixXd edge;
  Eigen::MatrixXd edge_d;
};

/// Lagrange polynomials h_i on the GLL nodes and the edge polynomials
/// e_j = -sum_{k<=j} h_k', which satisfy h_i' = e_{i-1} - e_i and
/// integrate to one over [node_j, node_{j+1}].
class SpectralBasis1D {
public:
  explicit SpectralBasis1D(int degree);

  int degree() const { return degree_; }
  std::span<const double> nodes() const { return rule_.points; }
  std::span<const double> weights() const { return rule_.weights; }

  std::vector<double> eval_nodal(double x) const;
  std::vector<double> eval_nodal_derivative(double x) const;
  std::vector<double> eval_edge(double x) const;
  std::vector<double> eval_edge_derivative(double x) const;

  BasisTable tabulate(std::span<const double> points) const;

private:
  /// Values, first and second derivatives of every h_i at x.
  void lagrange(double x, double* value, double* d1, double* d2) const;
  static void check_range(double x);

  int degree_;
  QuadratureRule rule_;
  std::vector<double> denominators_;
};

}  // namespace mhd
