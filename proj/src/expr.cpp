#include "mhd/expr.hpp"

#include <cmath>
#include <sstream>

namespace mhd {

struct Expr::Node {
  enum class Kind { constant, variable, add, mul, neg, sin, cos, exp };
  Kind kind;
  double value = 0.0;
  Var var = Var::x;
  std::shared_ptr<const Node> a, b;
};

namespace {

using Kind = Expr::Node::Kind;

}  // namespace

Expr::Expr(double value)
    : node_(std::make_shared<const Node>(Node{Kind::constant, value, Var::x, {}, {}})) {}

Expr Expr::var(Var v) {
  return Expr(std::make_shared<const Node>(Node{Kind::variable, 0.0, v, {}, {}}));
}

bool Expr::is_constant(double value) const {
  return node_->kind == Kind::constant && node_->value == value;
}

namespace {

double eval(const Expr::Node& n, double x, double y, double t) {
  switch (n.kind) {
    case Kind::constant: return n.value;
    case Kind::variable: return n.var == Var::x ? x : (n.var == Var::y ? y : t);
    case Kind::add: return eval(*n.a, x, y, t) + eval(*n.b, x, y, t);
    case Kind::mul: return eval(*n.a, x, y, t) * eval(*n.b, x, y, t);
    case Kind::neg: return -eval(*n.a, x, y, t);
    case Kind::sin: return std::sin(eval(*n.a, x, y, t));
    case Kind::cos: return std::cos(eval(*n.a, x, y, t));
    case Kind::exp: return std::exp(eval(*n.a, x, y, t));
  }
  return 0.0;
}

}  // namespace

double Expr::operator()(double x, double y, double t) const { return eval(*node_, x, y, t); }

Expr Expr::diff(Var v) const {
  const Node& n = *node_;
  const Expr a = n.a ? Expr(n.a) : Expr(0.0);
  const Expr b = n.b ? Expr(n.b) : Expr(0.0);
  switch (n.kind) {
    case Kind::constant: return Expr(0.0);
    case Kind::variable: return Expr(n.var == v ? 1.0 : 0.0);
    case Kind::add: return a.diff(v) + b.diff(v);
    case Kind::mul: return a.diff(v) * b + a * b.diff(v);
    case Kind::neg: return -a.diff(v);
    case Kind::sin: return cos(a) * a.diff(v);
    case Kind::cos: return -(sin(a) * a.diff(v));
    case Kind::exp: return *this * a.diff(v);
  }
  return Expr(0.0);
}

std::string Expr::str() const {
  const Node& n = *node_;
  const Expr a = n.a ? Expr(n.a) : Expr(0.0);
  const Expr b = n.b ? Expr(n.b) : Expr(0.0);
  std::ostringstream s;
  switch (n.kind) {
    case Kind::constant: s << n.value; break;
    case Kind::variable: s << (n.var == Var::x ? "x" : (n.var == Var::y ? "y" : "t")); break;
    case Kind::add: s << "(" << a.str() << " + " << b.str() << ")"; break;
    case Kind::mul: s << a.str() << "*" << b.str(); break;
    case Kind::neg: s << "-(" << a.str() << ")"; break;
    case Kind::sin: s << "sin(" << a.str() << ")"; break;
    case Kind::cos: s << "cos(" << a.str() << ")"; break;
    case Kind::exp: s << "exp(" << a.str() << ")"; break;
  }
  return s.str();
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  if (a.node_->kind == Kind::constant && b.node_->kind == Kind::constant) {
    return Expr(a.node_->value + b.node_->value);
  }
  return Expr(std::make_shared<const Expr::Node>(Expr::Node{Kind::add, 0.0, Var::x, a.node_, b.node_}));
}

Expr operator-(const Expr& a) {
  if (a.node_->kind == Kind::constant) return Expr(-a.node_->value);
  return Expr(std::make_shared<const Expr::Node>(Expr::Node{Kind::neg, 0.0, Var::x, a.node_, nullptr}));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.node_->kind == Kind::constant && b.node_->kind == Kind::constant) {
    return Expr(a.node_->value * b.node_->value);
  }
  return Expr(std::make_shared<const Expr::Node>(Expr::Node{Kind::mul, 0.0, Var::x, a.node_, b.node_}));
}

Expr sin(const Expr& a) {
  return Expr(std::make_shared<const Expr::Node>(Expr::Node{Kind::sin, 0.0, Var::x, a.node_, nullptr}));
}

Expr cos(const Expr& a) {
  return Expr(std::make_shared<const Expr::Node>(Expr::Node{Kind::cos, 0.0, Var::x, a.node_, nullptr}));
}

Expr exp(const Expr& a) {
  return Expr(std::make_shared<const Expr::Node>(Expr::Node{Kind::exp, 0.0, Var::x, a.node_, nullptr}));
}

}  // namespace mhd
