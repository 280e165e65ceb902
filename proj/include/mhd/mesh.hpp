#pragma once

/// @file mesh.hpp
/// @brief Tensor-product quadrilateral meshes with per-direction stretching,
/// periodic identification and labelled boundary faces.

#include <array>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mhd {

enum class Stretch {
  uniform,
  boundary_refined,  ///< cosine (Gauss-Lobatto) clustering towards both ends
};

struct Bounds {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
};

enum class Side { left, right, bottom, top };

std::string_view side_label(Side side);

/// Outward unit normal of a domain side.
std::array<double, 2> side_normal(Side side);

/// Counterclockwise unit tangent t = (-n_y, n_x).
std::array<double, 2> side_tangent(Side side);

struct BoundaryFace {
  int element = 0;
  Side side = Side::left;
  /// +1 when the counterclockwise tangent points along the positive axis
  /// direction of the face, -1 otherwise.
  int orientation = 1;
};

/// Immutable axis-aligned quadrilateral mesh.
class Mesh {
public:
  Mesh(Bounds bounds, int kx, int ky, std::array<Stretch, 2> stretch,
       std::array<bool, 2> periodic);

  const Bounds& bounds() const { return bounds_; }
  int kx() const { return kx_; }
  int ky() const { return ky_; }
  int num_elements() const { return kx_ * ky_; }
  int element_index(int ex, int ey) const { return ey * kx_ + ex; }
  std::array<int, 2> element_coords(int element) const {
    return {element % kx_, element / kx_};
  }

  std::span<const double> edges_x() const { return edges_x_; }
  std::span<const double> edges_y() const { return edges_y_; }
  double hx(int ex) const { return edges_x_[ex + 1] - edges_x_[ex]; }
  double hy(int ey) const { return edges_y_[ey + 1] - edges_y_[ey]; }
  double element_area(int element) const;
  double area() const;

  bool periodic_x() const { return periodic_[0]; }
  bool periodic_y() const { return periodic_[1]; }
  const std::array<Stretch, 2>& stretch() const { return stretch_; }

  /// Labels of the non-periodic boundary sides, in left/right/bottom/top order.
  std::vector<std::string> labels() const;
  bool has_label(std::string_view label) const;
  Side side_of(std::string_view label) const;

  /// Faces carrying @p label, ordered along the side by increasing coordinate.
  /// Throws std::invalid_argument for unknown labels (including periodic sides).
  std::vector<BoundaryFace> boundary_faces(std::string_view label) const;

  /// Element indices (per direction) whose closed interval contains the
  /// coordinate. Two entries when the point sits on an interior interface.
  std::vector<int> locate_x(double x) const;
  std::vector<int> locate_y(double y) const;

private:
  Bounds bounds_;
  int kx_;
  int ky_;
  std::array<Stretch, 2> stretch_;
  std::array<bool, 2> periodic_;
  std::vector<double> edges_x_;
  std::vector<double> edges_y_;
};

/// Element edge coordinates of one direction for a stretching law.
std::vector<double> stretched_edges(double lo, double hi, int k, Stretch stretch);

Mesh build_mesh(Bounds bounds, int kx, int ky, std::array<Stretch, 2> stretch,
                std::array<bool, 2> periodic);

/// The three boundary partitions of the fluid and Maxwell subproblems.
/// Each pair must exactly cover the labels of the mesh and be disjoint.
struct BoundaryPartition {
  std::set<std::string> gamma_P;
  std::set<std::string> gamma_u_normal;
  std::set<std::string> gamma_u_tangential;
  std::set<std::string> gamma_omega;
  std::set<std::string> gamma_E;
  std::set<std::string> gamma_H;

  /// Throws std::invalid_argument when a pair overlaps or fails to cover.
  void validate(const Mesh& mesh) const;

  /// Natural data everywhere: gamma_P, gamma_u_tangential and gamma_E hold all labels.
  static BoundaryPartition all_natural(const Mesh& mesh);
};

}  // namespace mhd
