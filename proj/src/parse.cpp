#include <cctype>
#include <charconv>
#include <cmath>

#include "pg/expr.hpp"

namespace pg {

namespace {

constexpr int kPrecAdd = 1;
constexpr int kPrecMul = 2;
constexpr int kPrecPow = 4;
constexpr int kPrecAtom = 5;

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

const char* function_name(Op op) {
  switch (op) {
    case Op::Sin:
      return "sin";
    case Op::Cos:
      return "cos";
    case Op::Exp:
      return "exp";
    case Op::Ln:
      return "ln";
    case Op::Sqrt:
      return "sqrt";
    default:
      return "";
  }
}

int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::Add:
    case Op::Sub:
      return kPrecAdd;
    case Op::Mul:
    case Op::Div:
      return kPrecMul;
    case Op::Neg:
      return kPrecMul;  // printed as "-atom", parenthesised inside products
    case Op::Pow:
      return kPrecPow;
    case Op::Const:
      return e.constant() < 0.0 ? kPrecMul : kPrecAtom;
    default:
      return kPrecAtom;
  }
}

void print(const Expr& e, std::span<const std::string> names, int min_prec, std::string& out) {
  const bool wrap = precedence(e) < min_prec;
  if (wrap) out += '(';
  const Node& n = e.node();
  switch (n.op) {
    case Op::Const:
      out += format_number(n.value);
      break;
    case Op::Var:
      out += coordinate_name(names, n.index);
      break;
    case Op::Neg:
      out += '-';
      print(e.lhs(), names, kPrecAtom, out);
      break;
    case Op::Add:
      print(e.lhs(), names, kPrecAdd, out);
      out += " + ";
      print(e.rhs(), names, kPrecMul, out);
      break;
    case Op::Sub:
      print(e.lhs(), names, kPrecAdd, out);
      out += " - ";
      print(e.rhs(), names, kPrecMul, out);
      break;
    case Op::Mul:
      print(e.lhs(), names, kPrecMul, out);
      out += '*';
      print(e.rhs(), names, kPrecPow, out);
      break;
    case Op::Div:
      print(e.lhs(), names, kPrecMul, out);
      out += '/';
      print(e.rhs(), names, kPrecPow, out);
      break;
    case Op::Pow:
      print(e.lhs(), names, kPrecAtom, out);
      out += '^';
      out += std::to_string(n.index);
      break;
    default:
      out += function_name(n.op);
      out += '(';
      print(e.lhs(), names, 0, out);
      out += ')';
      break;
  }
  if (wrap) out += ')';
}

class Parser {
 public:
  Parser(std::string_view src, std::span<const std::string> names) : src_(src), names_(names) {}

  Expr run() {
    Expr e = expr();
    skip_space();
    if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= src_.size()) fail("unexpected end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  Expr expr() {
    Expr acc;
    if (accept('-')) {
      acc = raw::unary(Op::Neg, term());
    } else {
      accept('+');
      acc = term();
    }
    for (;;) {
      if (accept('+')) {
        acc = raw::binary(Op::Add, acc, term());
      } else if (accept('-')) {
        acc = raw::binary(Op::Sub, acc, term());
      } else {
        return acc;
      }
    }
  }

  Expr term() {
    Expr acc = factor();
    for (;;) {
      if (accept('*')) {
        acc = raw::binary(Op::Mul, acc, factor());
      } else if (accept('/')) {
        acc = raw::binary(Op::Div, acc, factor());
      } else {
        return acc;
      }
    }
  }

  Expr factor() {
    Expr base = atom();
    if (!accept('^')) return base;
    const bool negative = accept('-');
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (start == pos_) {
      if (pos_ >= src_.size()) fail("unexpected end of input");
      fail("exponent must be an integer");
    }
    int exponent = 0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, exponent);
    if (ec != std::errc()) {
      pos_ = start;
      fail("exponent out of range");
    }
    (void)ptr;
    return raw::power(base, negative ? -exponent : exponent);
  }

  Expr atom() {
    skip_space();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '-') {
      ++pos_;
      return raw::unary(Op::Neg, atom());
    }
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), v);
    if (ec != std::errc() || !std::isfinite(v)) fail("malformed number");
    pos_ = static_cast<std::size_t>(ptr - src_.data());
    (void)start;
    return Expr(make_constant(v));
  }

  static Expr make_constant(double v) { return Expr(v); }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == '(') {
      Op op;
      if (name == "sin") {
        op = Op::Sin;
      } else if (name == "cos") {
        op = Op::Cos;
      } else if (name == "exp") {
        op = Op::Exp;
      } else if (name == "ln") {
        op = Op::Ln;
      } else if (name == "sqrt") {
        op = Op::Sqrt;
      } else {
        pos_ = start;
        fail("unknown function '" + std::string(name) + "'");
      }
      ++pos_;
      Expr arg = expr();
      expect(')');
      return raw::unary(op, arg);
    }
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == name) return Expr::variable(static_cast<int>(i));
    }
    pos_ = start;
    fail("undeclared coordinate '" + std::string(name) + "'");
  }

  std::string_view src_;
  std::span<const std::string> names_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_string(const Expr& e, std::span<const std::string> names) {
  std::string out;
  print(e, names, 0, out);
  return out;
}

Expr parse(std::string_view src, std::span<const std::string> names) { return Parser(src, names).run(); }

}  // namespace pg
