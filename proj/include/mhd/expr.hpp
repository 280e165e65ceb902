#pragma once

/// @file expr.hpp
/// @brief Small symbolic expressions in (x, y, t) with exact differentiation,
/// used to derive manufactured source terms.

#include <memory>
#include <string>

namespace mhd {

enum class Var { x, y, t };

class Expr {
public:
  Expr(double value = 0.0);  // NOLINT: implicit from constants is the point
  static Expr var(Var v);

  double operator()(double x, double y, double t) const;
  Expr diff(Var v) const;
  /// True when the expression is the literal constant @p value.
  bool is_constant(double value) const;
  std::string str() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr sin(const Expr& a);
  friend Expr cos(const Expr& a);
  friend Expr exp(const Expr& a);

  struct Node;

private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);

}  // namespace mhd
