#include "mhd/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mhd {

std::string_view side_label(Side side) {
  switch (side) {
    case Side::left: return "left";
    case Side::right: return "right";
    case Side::bottom: return "bottom";
    case Side::top: return "top";
  }
  return "";
}

std::array<double, 2> side_normal(Side side) {
  switch (side) {
    case Side::left: return {-1.0, 0.0};
    case Side::right: return {1.0, 0.0};
    case Side::bottom: return {0.0, -1.0};
    case Side::top: return {0.0, 1.0};
  }
  return {0.0, 0.0};
}

std::array<double, 2> side_tangent(Side side) {
  const auto n = side_normal(side);
  return {-n[1], n[0]};
}

std::vector<double> stretched_edges(double lo, double hi, int k, Stretch stretch) {
  std::vector<double> edges(k + 1);
  const double length = hi - lo;
  for (int i = 0; i <= k; ++i) {
    const double s = static_cast<double>(i) / k;
    if (stretch == Stretch::uniform) {
      edges[i] = lo + length * s;
    } else {
      edges[i] = lo + length * 0.5 * (1.0 - std::cos(std::numbers::pi * s));
    }
  }
  edges.front() = lo;
  edges.back() = hi;
  return edges;
}

Mesh::Mesh(Bounds bounds, int kx, int ky, std::array<Stretch, 2> stretch,
           std::array<bool, 2> periodic)
    : bounds_(bounds), kx_(kx), ky_(ky), stretch_(stretch), periodic_(periodic) {
  if (kx < 1 || ky < 1) {
    throw std::invalid_argument("mesh: element counts must be >= 1");
  }
  if (!(bounds.x_max > bounds.x_min) || !(bounds.y_max > bounds.y_min)) {
    throw std::invalid_argument("mesh: degenerate domain bounds");
  }
  for (int d = 0; d < 2; ++d) {
    if (periodic[d] && stretch[d] == Stretch::boundary_refined) {
      throw std::invalid_argument(
          "mesh: boundary refinement requested in a periodic direction");
    }
  }
  edges_x_ = stretched_edges(bounds.x_min, bounds.x_max, kx, stretch[0]);
  edges_y_ = stretched_edges(bounds.y_min, bounds.y_max, ky, stretch[1]);
}

double Mesh::element_area(int element) const {
  const auto [ex, ey] = element_coords(element);
  return hx(ex) * hy(ey);
}

double Mesh::area() const {
  double total = 0.0;
  for (int e = 0; e < num_elements(); ++e) total += element_area(e);
  return total;
}

std::vector<std::string> Mesh::labels() const {
  std::vector<std::string> out;
  if (!periodic_x()) {
    out.emplace_back("left");
    out.emplace_back("right");
  }
  if (!periodic_y()) {
    out.emplace_back("bottom");
    out.emplace_back("top");
  }
  return out;
}

bool Mesh::has_label(std::string_view label) const {
  const auto all = labels();
  return std::find(all.begin(), all.end(), label) != all.end();
}

Side Mesh::side_of(std::string_view label) const {
  if (!has_label(label)) {
    throw std::invalid_argument("mesh: unknown boundary label '" + std::string(label) + "'");
  }
  if (label == "left") return Side::left;
  if (label == "right") return Side::right;
  if (label == "bottom") return Side::bottom;
  return Side::top;
}

std::vector<BoundaryFace> Mesh::boundary_faces(std::string_view label) const {
  const Side side = side_of(label);
  const auto t = side_tangent(side);
  std::vector<BoundaryFace> faces;
  if (side == Side::left || side == Side::right) {
    const int ex = side == Side::left ? 0 : kx_ - 1;
    const int orient = t[1] > 0 ? 1 : -1;
    for (int ey = 0; ey < ky_; ++ey) faces.push_back({element_index(ex, ey), side, orient});
  } else {
    const int ey = side == Side::bottom ? 0 : ky_ - 1;
    const int orient = t[0] > 0 ? 1 : -1;
    for (int ex = 0; ex < kx_; ++ex) faces.push_back({element_index(ex, ey), side, orient});
  }
  return faces;
}

namespace {

std::vector<int> locate(std::span<const double> edges, double x) {
  const int k = static_cast<int>(edges.size()) - 1;
  const double tol = 1e-12 * (edges.back() - edges.front());
  if (x < edges.front() - tol || x > edges.back() + tol) {
    throw std::out_of_range("mesh: coordinate outside the domain");
  }
  std::vector<int> out;
  for (int i = 0; i < k; ++i) {
    if (x >= edges[i] - tol && x <= edges[i + 1] + tol) out.push_back(i);
  }
  return out;
}

}  // namespace

std::vector<int> Mesh::locate_x(double x) const { return locate(edges_x_, x); }
std::vector<int> Mesh::locate_y(double y) const { return locate(edges_y_, y); }

Mesh build_mesh(Bounds bounds, int kx, int ky, std::array<Stretch, 2> stretch,
                std::array<bool, 2> periodic) {
  return Mesh(bounds, kx, ky, stretch, periodic);
}

namespace {

void check_pair(const Mesh& mesh, const std::set<std::string>& a,
                const std::set<std::string>& b, const char* name) {
  for (const auto& label : a) {
    if (b.count(label)) {
      throw std::invalid_argument(std::string("boundary partition ") + name +
                                  ": label '" + label + "' appears twice");
    }
  }
  const auto labels = mesh.labels();
  for (const auto& label : labels) {
    if (!a.count(label) && !b.count(label)) {
      throw std::invalid_argument(std::string("boundary partition ") + name +
                                  ": label '" + label + "' is not covered");
    }
  }
  for (const auto* set : {&a, &b}) {
    for (const auto& label : *set) {
      if (!mesh.has_label(label)) {
        throw std::invalid_argument(std::string("boundary partition ") + name +
                                    ": label '" + label + "' is not a boundary of the mesh");
      }
    }
  }
}

}  // namespace

void BoundaryPartition::validate(const Mesh& mesh) const {
  check_pair(mesh, gamma_P, gamma_u_normal, "{P, u.n}");
  check_pair(mesh, gamma_u_tangential, gamma_omega, "{u x n, omega}");
  check_pair(mesh, gamma_E, gamma_H, "{E, H}");
}

BoundaryPartition BoundaryPartition::all_natural(const Mesh& mesh) {
  BoundaryPartition p;
  for (const auto& label : mesh.labels()) {
    p.gamma_P.insert(label);
    p.gamma_u_tangential.insert(label);
    p.gamma_E.insert(label);
  }
  return p;
}

}  // namespace mhd
