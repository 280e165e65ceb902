#include "mhd/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mhd {

std::pair<double, double> legendre(int n, double x) {
  if (n == 0) return {1.0, 0.0};
  double p_prev = 1.0;
  double p = x;
  for (int k = 2; k <= n; ++k) {
    const double p_next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k;
    p_prev = p;
    p = p_next;
  }
  double dp;
  if (std::abs(1.0 - x * x) < 1e-15) {
    const double sign = (x > 0.0 || n % 2 == 1) ? 1.0 : -1.0;
    dp = sign * 0.5 * n * (n + 1.0);
  } else {
    dp = n * (p_prev - x * p) / (1.0 - x * x);
  }
  return {p, dp};
}

QuadratureRule gauss_legendre(int npoints) {
  if (npoints < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
  QuadratureRule rule;
  rule.points.resize(npoints);
  rule.weights.resize(npoints);
  for (int i = 0; i < npoints; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (npoints + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(npoints, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [p, dp] = legendre(npoints, x);
    (void)p;
    rule.points[npoints - 1 - i] = x;
    rule.weights[npoints - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  for (int i = 0; i < npoints / 2; ++i) {
    const double x = 0.5 * (rule.points[npoints - 1 - i] - rule.points[i]);
    const double w = 0.5 * (rule.weights[npoints - 1 - i] + rule.weights[i]);
    rule.points[i] = -x;
    rule.points[npoints - 1 - i] = x;
    rule.weights[i] = rule.weights[npoints - 1 - i] = w;
  }
  if (npoints % 2 == 1) rule.points[npoints / 2] = 0.0;
  return rule;
}

QuadratureRule quadrature(int order) {
  if (order < 1) throw std::invalid_argument("quadrature: order must be >= 1");
  return gauss_legendre(order);
}

QuadratureRule gll_nodes(int degree) {
  if (degree < 1) throw std::invalid_argument("gll_nodes: degree must be >= 1");
  const int n = degree;
  QuadratureRule rule;
  rule.points.resize(n + 1);
  rule.weights.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    double x = -std::cos(std::numbers::pi * i / n);
    if (i > 0 && i < n) {
      for (int it = 0; it < 100; ++it) {
        const auto [p, dp] = legendre(n, x);
        const auto [pm, dpm] = legendre(n - 1, x);
        (void)dp;
        (void)dpm;
        const double dx = (x * p - pm) / ((n + 1.0) * p);
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
    }
    rule.points[i] = x;
  }
  for (int i = 0; i <= n / 2; ++i) {
    const double x = 0.5 * (rule.points[n - i] - rule.points[i]);
    rule.points[i] = -x;
    rule.points[n - i] = x;
  }
  if (n % 2 == 0) rule.points[n / 2] = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double p = legendre(n, rule.points[i]).first;
    rule.weights[i] = 2.0 / (n * (n + 1.0) * p * p);
  }
  return rule;
}

int default_quadrature_points(int degree) {
  return std::max(degree + 3, (3 * degree + 3) / 2);
}

SpectralBasis1D::SpectralBasis1D(int degree) : degree_(degree), rule_(gll_nodes(degree)) {
  denominators_.resize(degree + 1);
  for (int i = 0; i <= degree; ++i) {
    double d = 1.0;
    for (int m = 0; m <= degree; ++m) {
      if (m != i) d *= rule_.points[i] - rule_.points[m];
    }
    denominators_[i] = d;
  }
}

void SpectralBasis1D::check_range(double x) {
  if (!(x >= -1.0 - 1e-14 && x <= 1.0 + 1e-14)) {
    throw std::out_of_range("basis: evaluation point outside [-1, 1]");
  }
}

void SpectralBasis1D::lagrange(double x, double* value, double* d1, double* d2) const {
  const auto& nodes = rule_.points;
  for (int i = 0; i <= degree_; ++i) {
    double p0 = 1.0, p1 = 0.0, p2 = 0.0;
    for (int m = 0; m <= degree_; ++m) {
      if (m == i) continue;
      const double f = x - nodes[m];
      p2 = p2 * f + 2.0 * p1;
      p1 = p1 * f + p0;
      p0 = p0 * f;
    }
    value[i] = p0 / denominators_[i];
    d1[i] = p1 / denominators_[i];
    d2[i] = p2 / denominators_[i];
  }
}

std::vector<double> SpectralBasis1D::eval_nodal(double x) const {
  check_range(x);
  std::vector<double> v(degree_ + 1), d1(degree_ + 1), d2(degree_ + 1);
  lagrange(x, v.data(), d1.data(), d2.data());
  return v;
}

std::vector<double> SpectralBasis1D::eval_nodal_derivative(double x) const {
  check_range(x);
  std::vector<double> v(degree_ + 1), d1(degree_ + 1), d2(degree_ + 1);
  lagrange(x, v.data(), d1.data(), d2.data());
  return d1;
}

std::vector<double> SpectralBasis1D::eval_edge(double x) const {
  check_range(x);
  std::vector<double> v(degree_ + 1), d1(degree_ + 1), d2(degree_ + 1);
  lagrange(x, v.data(), d1.data(), d2.data());
  std::vector<double> e(degree_);
  double running = 0.0;
  for (int j = 0; j < degree_; ++j) {
    running += d1[j];
    e[j] = -running;
  }
  return e;
}

std::vector<double> SpectralBasis1D::eval_edge_derivative(double x) const {
  check_range(x);
  std::vector<double> v(degree_ + 1), d1(degree_ + 1), d2(degree_ + 1);
  lagrange(x, v.data(), d1.data(), d2.data());
  std::vector<double> e(degree_);
  double running = 0.0;
  for (int j = 0; j < degree_; ++j) {
    running += d2[j];
    e[j] = -running;
  }
  return e;
}

BasisTable SpectralBasis1D::tabulate(std::span<const double> points) const {
  const int np = static_cast<int>(points.size());
  BasisTable t;
  t.nodal.resize(degree_ + 1, np);
  t.nodal_d.resize(degree_ + 1, np);
  t.edge.resize(degree_, np);
  t.edge_d.resize(degree_, np);
  std::vector<double> v(degree_ + 1), d1(degree_ + 1), d2(degree_ + 1);
  for (int q = 0; q < np; ++q) {
    check_range(points[q]);
    lagrange(points[q], v.data(), d1.data(), d2.data());
    double run1 = 0.0, run2 = 0.0;
    for (int i = 0; i <= degree_; ++i) {
      t.nodal(i, q) = v[i];
      t.nodal_d(i, q) = d1[i];
    }
    for (int j = 0; j < degree_; ++j) {
      run1 += d1[j];
      run2 += d2[j];
      t.edge(j, q) = -run1;
      t.edge_d(j, q) = -run2;
    }
  }
  return t;
}

}  // namespace mhd
