#include "pg/expr.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace pg {

namespace {

using NodePtr = std::shared_ptr<const Node>;

NodePtr make_node(Op op, double value, int index, NodePtr lhs, NodePtr rhs) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->value = value;
  n->index = index;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

const NodePtr& shared_zero() {
  static const NodePtr z = make_node(Op::Const, 0.0, 0, nullptr, nullptr);
  return z;
}

const NodePtr& shared_one() {
  static const NodePtr o = make_node(Op::Const, 1.0, 0, nullptr, nullptr);
  return o;
}

NodePtr constant_node(double c) {
  if (c == 0.0 && !std::signbit(c)) return shared_zero();
  if (c == 1.0) return shared_one();
  return make_node(Op::Const, c, 0, nullptr, nullptr);
}

bool is_function(Op op) {
  return op == Op::Sin || op == Op::Cos || op == Op::Exp || op == Op::Ln || op == Op::Sqrt;
}

}  // namespace

Expr::Expr() : node_(shared_zero()) {}

Expr::Expr(double constant) : node_(constant_node(constant)) {}

Expr Expr::variable(int index) { return Expr(make_node(Op::Var, 0.0, index, nullptr, nullptr)); }

Op Expr::op() const { return node_->op; }

bool Expr::is_constant(double c) const { return node_->op == Op::Const && node_->value == c; }

double Expr::constant() const { return node_->value; }

Expr Expr::lhs() const { return Expr(node_->lhs); }
Expr Expr::rhs() const { return Expr(node_->rhs); }

namespace raw {

Expr unary(Op op, Expr a) { return Expr(make_node(op, 0.0, 0, a.ptr(), nullptr)); }

Expr binary(Op op, Expr a, Expr b) { return Expr(make_node(op, 0.0, 0, a.ptr(), b.ptr())); }

Expr power(Expr base, int exponent) { return Expr(make_node(Op::Pow, 0.0, exponent, base.ptr(), nullptr)); }

}  // namespace raw

// Folding constructors. Every rule is value-preserving in IEEE arithmetic
// wherever the original expression is defined.

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr(-a.constant());
  if (a.op() == Op::Neg) return a.lhs();
  return raw::unary(Op::Neg, a);
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.constant() + b.constant());
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (b.op() == Op::Neg) return a - b.lhs();
  return raw::binary(Op::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.constant() - b.constant());
  if (b.is_zero()) return a;
  if (a.is_zero()) return -b;
  if (a.id() == b.id()) return Expr(0.0);
  if (b.op() == Op::Neg) return a + b.lhs();
  return raw::binary(Op::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.constant() * b.constant());
  if (a.is_zero() || b.is_zero()) return Expr(0.0);
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  if (a.is_constant(-1.0)) return -b;
  if (b.is_constant(-1.0)) return -a;
  if (a.op() == Op::Neg && b.op() == Op::Neg) return a.lhs() * b.lhs();
  if (a.op() == Op::Neg) return -(a.lhs() * b);
  if (b.op() == Op::Neg) return -(a * b.lhs());
  return raw::binary(Op::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant() && b.constant() != 0.0) return Expr(a.constant() / b.constant());
  if (a.is_zero()) return Expr(0.0);
  if (b.is_one()) return a;
  if (b.is_constant(-1.0)) return -a;
  if (a.op() == Op::Neg) return -(a.lhs() / b);
  return raw::binary(Op::Div, a, b);
}

Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

Expr pow(const Expr& base, int exponent) {
  if (exponent == 0) return Expr(1.0);
  if (exponent == 1) return base;
  if (base.is_constant() && (base.constant() != 0.0 || exponent > 0)) {
    return Expr(std::pow(base.constant(), exponent));
  }
  return raw::power(base, exponent);
}

Expr sin(const Expr& a) {
  if (a.is_constant()) return Expr(std::sin(a.constant()));
  return raw::unary(Op::Sin, a);
}

Expr cos(const Expr& a) {
  if (a.is_constant()) return Expr(std::cos(a.constant()));
  return raw::unary(Op::Cos, a);
}

Expr exp(const Expr& a) {
  if (a.is_constant() && std::isfinite(std::exp(a.constant()))) return Expr(std::exp(a.constant()));
  return raw::unary(Op::Exp, a);
}

Expr ln(const Expr& a) {
  if (a.is_constant() && a.constant() > 0.0) return Expr(std::log(a.constant()));
  return raw::unary(Op::Ln, a);
}

Expr sqrt(const Expr& a) {
  if (a.is_constant() && a.constant() >= 0.0) return Expr(std::sqrt(a.constant()));
  return raw::unary(Op::Sqrt, a);
}

namespace {

class Differentiator {
 public:
  explicit Differentiator(int index) : index_(index) {}

  Expr operator()(const Expr& e) {
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    Expr d = compute(e);
    memo_.emplace(e.id(), d);
    return d;
  }

 private:
  Expr compute(const Expr& e) {
    switch (e.op()) {
      case Op::Const:
        return Expr(0.0);
      case Op::Var:
        return Expr(e.node().index == index_ ? 1.0 : 0.0);
      case Op::Neg:
        return -(*this)(e.lhs());
      case Op::Add:
        return (*this)(e.lhs()) + (*this)(e.rhs());
      case Op::Sub:
        return (*this)(e.lhs()) - (*this)(e.rhs());
      case Op::Mul: {
        const Expr a = e.lhs();
        const Expr b = e.rhs();
        return (*this)(a) * b + a * (*this)(b);
      }
      case Op::Div: {
        const Expr a = e.lhs();
        const Expr b = e.rhs();
        const Expr da = (*this)(a);
        const Expr db = (*this)(b);
        if (db.is_zero()) return da / b;
        return (da * b - a * db) / pow(b, 2);
      }
      case Op::Pow: {
        const Expr a = e.lhs();
        const int n = e.node().index;
        return Expr(static_cast<double>(n)) * pow(a, n - 1) * (*this)(a);
      }
      case Op::Sin:
        return cos(e.lhs()) * (*this)(e.lhs());
      case Op::Cos:
        return -(sin(e.lhs()) * (*this)(e.lhs()));
      case Op::Exp:
        return e * (*this)(e.lhs());
      case Op::Ln:
        return (*this)(e.lhs()) / e.lhs();
      case Op::Sqrt:
        return (*this)(e.lhs()) / (Expr(2.0) * e);
    }
    return Expr(0.0);
  }

  int index_;
  std::unordered_map<const Node*, Expr> memo_;
};

template <typename Fn>
class Rebuilder {
 public:
  explicit Rebuilder(Fn leaf) : leaf_(std::move(leaf)) {}

  Expr operator()(const Expr& e) {
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    Expr r = compute(e);
    memo_.emplace(e.id(), r);
    return r;
  }

 private:
  Expr compute(const Expr& e) {
    switch (e.op()) {
      case Op::Const:
      case Op::Var:
        return leaf_(e);
      case Op::Neg:
        return -(*this)(e.lhs());
      case Op::Add:
        return (*this)(e.lhs()) + (*this)(e.rhs());
      case Op::Sub:
        return (*this)(e.lhs()) - (*this)(e.rhs());
      case Op::Mul:
        return (*this)(e.lhs()) * (*this)(e.rhs());
      case Op::Div:
        return (*this)(e.lhs()) / (*this)(e.rhs());
      case Op::Pow:
        return pow((*this)(e.lhs()), e.node().index);
      case Op::Sin:
        return sin((*this)(e.lhs()));
      case Op::Cos:
        return cos((*this)(e.lhs()));
      case Op::Exp:
        return exp((*this)(e.lhs()));
      case Op::Ln:
        return ln((*this)(e.lhs()));
      case Op::Sqrt:
        return sqrt((*this)(e.lhs()));
    }
    return e;
  }

  Fn leaf_;
  std::unordered_map<const Node*, Expr> memo_;
};

template <typename Visit>
void visit_unique(const Expr& root, Visit&& visit) {
  std::unordered_set<const Node*> seen;
  std::vector<const Node*> stack{root.id()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    visit(*n);
    if (n->lhs) stack.push_back(n->lhs.get());
    if (n->rhs) stack.push_back(n->rhs.get());
  }
}

}  // namespace

Expr diff(const Expr& e, int index) { return Differentiator(index)(e); }

Expr simplify(const Expr& e) {
  auto keep = [](const Expr& leaf) { return leaf; };
  return Rebuilder<decltype(keep)>(keep)(e);
}

Expr remap(const Expr& e, std::span<const int> map) {
  auto rename = [map](const Expr& leaf) {
    if (leaf.op() != Op::Var) return leaf;
    const int i = leaf.node().index;
    if (i < 0 || static_cast<std::size_t>(i) >= map.size()) throw std::out_of_range("remap: coordinate index out of range");
    return Expr::variable(map[static_cast<std::size_t>(i)]);
  };
  return Rebuilder<decltype(rename)>(rename)(e);
}

bool depends_on(const Expr& e, int index) {
  bool found = false;
  visit_unique(e, [&](const Node& n) {
    if (n.op == Op::Var && n.index == index) found = true;
  });
  return found;
}

int max_variable(const Expr& e) {
  int m = -1;
  visit_unique(e, [&](const Node& n) {
    if (n.op == Op::Var) m = std::max(m, n.index);
  });
  return m;
}

std::size_t node_count(const Expr& e) {
  std::size_t count = 0;
  visit_unique(e, [&](const Node&) { ++count; });
  return count;
}

bool same_tree(const Expr& a, const Expr& b) {
  if (a.id() == b.id()) return true;
  const Node& x = a.node();
  const Node& y = b.node();
  if (x.op != y.op) return false;
  switch (x.op) {
    case Op::Const:
      return x.value == y.value;
    case Op::Var:
      return x.index == y.index;
    case Op::Pow:
      return x.index == y.index && same_tree(a.lhs(), b.lhs());
    default:
      break;
  }
  if (is_function(x.op) || x.op == Op::Neg) return same_tree(a.lhs(), b.lhs());
  return same_tree(a.lhs(), b.lhs()) && same_tree(a.rhs(), b.rhs());
}

std::string coordinate_name(std::span<const std::string> names, int index) {
  if (index >= 0 && static_cast<std::size_t>(index) < names.size()) return names[static_cast<std::size_t>(index)];
  return "x" + std::to_string(index + 1);
}

namespace {

class Evaluator {
 public:
  Evaluator(std::span<const double> point, std::span<const std::string> names) : point_(point), names_(names) {}

  double operator()(const Expr& e) {
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    const double v = compute(e);
    if (!std::isfinite(v)) throw EvalError("non-finite value", to_string(e, names_));
    memo_.emplace(e.id(), v);
    return v;
  }

 private:
  double compute(const Expr& e) {
    const Node& n = e.node();
    switch (n.op) {
      case Op::Const:
        return n.value;
      case Op::Var:
        if (n.index < 0 || static_cast<std::size_t>(n.index) >= point_.size()) {
          throw EvalError("coordinate outside the point", to_string(e, names_));
        }
        return point_[static_cast<std::size_t>(n.index)];
      case Op::Neg:
        return -(*this)(e.lhs());
      case Op::Add:
        return (*this)(e.lhs()) + (*this)(e.rhs());
      case Op::Sub:
        return (*this)(e.lhs()) - (*this)(e.rhs());
      case Op::Mul:
        return (*this)(e.lhs()) * (*this)(e.rhs());
      case Op::Div: {
        const double num = (*this)(e.lhs());
        const double den = (*this)(e.rhs());
        if (den == 0.0) throw EvalError("division by zero", to_string(e, names_));
        return num / den;
      }
      case Op::Pow: {
        const double b = (*this)(e.lhs());
        if (b == 0.0 && n.index < 0) throw EvalError("division by zero", to_string(e, names_));
        return std::pow(b, n.index);
      }
      case Op::Sin:
        return std::sin((*this)(e.lhs()));
      case Op::Cos:
        return std::cos((*this)(e.lhs()));
      case Op::Exp:
        return std::exp((*this)(e.lhs()));
      case Op::Ln: {
        const double a = (*this)(e.lhs());
        if (a <= 0.0) throw EvalError("ln of nonpositive value", to_string(e, names_));
        return std::log(a);
      }
      case Op::Sqrt: {
        const double a = (*this)(e.lhs());
        if (a < 0.0) throw EvalError("sqrt of negative value", to_string(e, names_));
        return std::sqrt(a);
      }
    }
    return 0.0;
  }

  std::span<const double> point_;
  std::span<const std::string> names_;
  std::unordered_map<const Node*, double> memo_;
};

}  // namespace

double eval(const Expr& e, std::span<const double> point, std::span<const std::string> names) {
  return Evaluator(point, names)(e);
}

}  // namespace pg
