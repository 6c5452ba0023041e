#include "pg/tape.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <optional>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pg {

namespace {

struct Key {
  Op op;
  int index;
  std::uint64_t bits;
  std::uint32_t a;
  std::uint32_t b;

  bool operator==(const Key&) const = default;
};

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    std::size_t h = static_cast<std::size_t>(k.op);
    auto mix = [&h](std::uint64_t v) { h ^= std::hash<std::uint64_t>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(k.index)));
    mix(k.bits);
    mix(k.a);
    mix(k.b);
    return h;
  }
};

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

}  // namespace

Tape::Tape(std::span<const Expr> outputs, std::vector<std::string> names) : names_(std::move(names)) {
  std::unordered_map<const Node*, std::uint32_t> by_node;
  std::unordered_map<Key, std::uint32_t, KeyHash> by_key;

  // Iterative post-order so deep left-leaning sums do not exhaust the stack.
  auto emit = [&](const Expr& root) -> std::uint32_t {
    std::vector<std::pair<Expr, bool>> stack{{root, false}};
    while (!stack.empty()) {
      auto [e, expanded] = stack.back();
      stack.pop_back();
      if (by_node.count(e.id())) continue;
      const Node& n = e.node();
      if (!expanded) {
        stack.emplace_back(e, true);
        if (n.rhs && !by_node.count(n.rhs.get())) stack.emplace_back(e.rhs(), false);
        if (n.lhs && !by_node.count(n.lhs.get())) stack.emplace_back(e.lhs(), false);
        continue;
      }
      Key key{n.op, n.op == Op::Var || n.op == Op::Pow ? n.index : 0, 0, kNone, kNone};
      if (n.op == Op::Const) std::memcpy(&key.bits, &n.value, sizeof key.bits);
      if (n.lhs) key.a = by_node.at(n.lhs.get());
      if (n.rhs) key.b = by_node.at(n.rhs.get());
      auto [it, inserted] = by_key.try_emplace(key, static_cast<std::uint32_t>(instrs_.size()));
      if (inserted) {
        instrs_.push_back(Instr{n.op, key.index, n.value, key.a, key.b});
        sources_.push_back(e);
      }
      by_node.emplace(e.id(), it->second);
    }
    return by_node.at(root.id());
  };

  outputs_.reserve(outputs.size());
  for (const Expr& e : outputs) outputs_.push_back(emit(e));
}

void Tape::fail(std::size_t instr, const char* what) const {
  throw EvalError(what, to_string(sources_[instr], names_));
}

void Tape::run(std::span<const double> point, std::span<double> scratch, std::span<double> out) const {
  double* v = scratch.data();
  for (std::size_t i = 0; i < instrs_.size(); ++i) {
    const Instr& in = instrs_[i];
    double r = 0.0;
    switch (in.op) {
      case Op::Const:
        r = in.value;
        break;
      case Op::Var:
        if (in.index < 0 || static_cast<std::size_t>(in.index) >= point.size()) fail(i, "coordinate outside the point");
        r = point[static_cast<std::size_t>(in.index)];
        break;
      case Op::Neg:
        r = -v[in.a];
        break;
      case Op::Add:
        r = v[in.a] + v[in.b];
        break;
      case Op::Sub:
        r = v[in.a] - v[in.b];
        break;
      case Op::Mul:
        r = v[in.a] * v[in.b];
        break;
      case Op::Div:
        if (v[in.b] == 0.0) fail(i, "division by zero");
        r = v[in.a] / v[in.b];
        break;
      case Op::Pow:
        if (v[in.a] == 0.0 && in.index < 0) fail(i, "division by zero");
        r = std::pow(v[in.a], in.index);
        break;
      case Op::Sin:
        r = std::sin(v[in.a]);
        break;
      case Op::Cos:
        r = std::cos(v[in.a]);
        break;
      case Op::Exp:
        r = std::exp(v[in.a]);
        break;
      case Op::Ln:
        if (v[in.a] <= 0.0) fail(i, "ln of nonpositive value");
        r = std::log(v[in.a]);
        break;
      case Op::Sqrt:
        if (v[in.a] < 0.0) fail(i, "sqrt of negative value");
        r = std::sqrt(v[in.a]);
        break;
    }
    if (!std::isfinite(r)) fail(i, "non-finite value");
    v[i] = r;
  }
  for (std::size_t k = 0; k < outputs_.size(); ++k) out[k] = v[outputs_[k]];
}

ValueTable evaluate(const Tape& tape, std::span<const std::vector<double>> points) {
  ValueTable table{points.size(), tape.outputs(), std::vector<double>(points.size() * tape.outputs())};
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  std::optional<SampleError> first;
  std::ptrdiff_t first_row = n;

#pragma omp parallel
  {
    std::vector<double> scratch(tape.size());
#pragma omp for schedule(static)
    for (std::ptrdiff_t r = 0; r < n; ++r) {
      try {
        tape.run(points[static_cast<std::size_t>(r)], scratch,
                 std::span<double>(table.data.data() + static_cast<std::size_t>(r) * table.cols, table.cols));
      } catch (const EvalError& e) {
#pragma omp critical(pg_tape_error)
        {
          if (r < first_row) {
            first_row = r;
            first.emplace(e, static_cast<std::size_t>(r), points[static_cast<std::size_t>(r)]);
          }
        }
      }
    }
  }
  if (first) throw *first;
  return table;
}

ValueTable evaluate_serial(const Tape& tape, std::span<const std::vector<double>> points) {
  ValueTable table{points.size(), tape.outputs(), std::vector<double>(points.size() * tape.outputs())};
  std::vector<double> scratch(tape.size());
  for (std::size_t r = 0; r < points.size(); ++r) {
    try {
      tape.run(points[r], scratch, std::span<double>(table.data.data() + r * table.cols, table.cols));
    } catch (const EvalError& e) {
      throw SampleError(e, r, points[r]);
    }
  }
  return table;
}

ValueTable evaluate_reference(std::span<const Expr> exprs, std::span<const std::vector<double>> points,
                              std::span<const std::string> names) {
  ValueTable table{points.size(), exprs.size(), std::vector<double>(points.size() * exprs.size())};
  for (std::size_t r = 0; r < points.size(); ++r) {
    for (std::size_t c = 0; c < exprs.size(); ++c) {
      try {
        table.data[r * exprs.size() + c] = eval(exprs[c], points[r], names);
      } catch (const EvalError& e) {
        throw SampleError(e, r, points[r]);
      }
    }
  }
  return table;
}

}  // namespace pg
