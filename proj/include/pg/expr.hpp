#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pg {

enum class Op : std::uint8_t { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Ln, Sqrt };

struct Node;

/// Immutable symbolic scalar over indexed chart coordinates.
///
/// Nodes are shared, never mutated, so an Expr may be copied freely and
/// evaluated from several threads at once. Arithmetic operators fold
/// constants and the 0/1 identities as they build; the raw:: builders
/// keep the tree exactly as written (the parser uses them).
class Expr {
 public:
  Expr();
  Expr(double constant);  // NOLINT(google-explicit-constructor)

  static Expr variable(int index);

  const Node& node() const { return *node_; }
  const Node* id() const { return node_.get(); }
  const std::shared_ptr<const Node>& ptr() const { return node_; }
  Op op() const;

  bool is_constant() const { return op() == Op::Const; }
  bool is_constant(double c) const;
  bool is_zero() const { return is_constant(0.0); }
  bool is_one() const { return is_constant(1.0); }

  // Unchecked: only meaningful for Const nodes.
  double constant() const;

  Expr lhs() const;
  Expr rhs() const;

  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

 private:
  std::shared_ptr<const Node> node_;
};

struct Node {
  Op op = Op::Const;
  double value = 0.0;  // Const
  int index = 0;       // Var: coordinate index; Pow: integer exponent
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

Expr operator-(const Expr& a);
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr& operator+=(Expr& a, const Expr& b);
Expr& operator-=(Expr& a, const Expr& b);
Expr& operator*=(Expr& a, const Expr& b);

Expr pow(const Expr& base, int exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr ln(const Expr& a);
Expr sqrt(const Expr& a);

namespace raw {
Expr unary(Op op, Expr a);
Expr binary(Op op, Expr a, Expr b);
Expr power(Expr base, int exponent);
}  // namespace raw

/// Exact partial derivative with respect to coordinate `index`.
Expr diff(const Expr& e, int index);

/// Bottom-up rebuild through the folding constructors, plus x^1 and
/// double-negation rules. Never changes a value on the common domain.
Expr simplify(const Expr& e);

/// Renumbers coordinates: variable i becomes variable map[i].
Expr remap(const Expr& e, std::span<const int> map);

bool depends_on(const Expr& e, int index);

/// Largest coordinate index in e, or -1 for a constant expression.
int max_variable(const Expr& e);

/// Distinct nodes reachable from e.
std::size_t node_count(const Expr& e);

/// Structural equality (same tree shape, same constants bit for bit).
bool same_tree(const Expr& a, const Expr& b);

class EvalError : public std::runtime_error {
 public:
  EvalError(const std::string& what, std::string node_text)
      : std::runtime_error(what + " at " + node_text), node_text_(std::move(node_text)) {}
  const std::string& node_text() const { return node_text_; }

 private:
  std::string node_text_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Reference evaluator: recursive with per-call memoisation. Throws
/// EvalError on division by zero, ln of a nonpositive value, sqrt of a
/// negative value, or any non-finite intermediate.
double eval(const Expr& e, std::span<const double> point, std::span<const std::string> names = {});

/// Default names are x1, x2, ... when `names` is empty.
std::string to_string(const Expr& e, std::span<const std::string> names = {});

/// expr := ['+'|'-'] term (('+'|'-') term)*
/// term := factor (('*'|'/') factor)*
/// factor := atom ['^' ['-'] integer]
/// atom := number | ident | ident '(' expr ')' | '(' expr ')' | '-' atom
Expr parse(std::string_view src, std::span<const std::string> names);

std::string coordinate_name(std::span<const std::string> names, int index);

}  // namespace pg
