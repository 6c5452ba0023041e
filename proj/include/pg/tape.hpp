#pragma once

#include <span>
#include <string>
#include <vector>

#include "pg/expr.hpp"

namespace pg {

/// Row-major block of values: one row per sample point, one column per
/// compiled output.
struct ValueTable {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

/// A batch of expressions flattened into one instruction list. Structurally
/// identical subtrees are merged, so shared work across outputs is done
/// once per point.
class Tape {
 public:
  Tape() = default;
  explicit Tape(std::span<const Expr> outputs, std::vector<std::string> names = {});

  std::size_t size() const { return instrs_.size(); }
  std::size_t outputs() const { return outputs_.size(); }

  /// Evaluates every output at one point. `scratch` must hold size() doubles.
  void run(std::span<const double> point, std::span<double> scratch, std::span<double> out) const;

 private:
  struct Instr {
    Op op;
    int index;  // Var coordinate, Pow exponent
    double value;
    std::uint32_t a;
    std::uint32_t b;
  };

  [[noreturn]] void fail(std::size_t instr, const char* what) const;

  std::vector<Instr> instrs_;
  std::vector<std::uint32_t> outputs_;
  std::vector<Expr> sources_;  // per instruction, for error messages
  std::vector<std::string> names_;
};

/// Evaluation error tied to the sample row that raised it.
class SampleError : public EvalError {
 public:
  SampleError(const EvalError& e, std::size_t row, std::vector<double> point)
      : EvalError(e), row_(row), point_(std::move(point)) {}
  std::size_t row() const { return row_; }
  const std::vector<double>& point() const { return point_; }

 private:
  std::size_t row_;
  std::vector<double> point_;
};

/// Parallel kernel: points are distributed over OpenMP threads. If several
/// points fail, the error from the lowest row is thrown.
ValueTable evaluate(const Tape& tape, std::span<const std::vector<double>> points);

/// Single-threaded tape evaluation, same contract as evaluate().
ValueTable evaluate_serial(const Tape& tape, std::span<const std::vector<double>> points);

/// Reference path with no tape at all: the recursive evaluator per
/// expression per point. Kept for cross-checking the kernels.
ValueTable evaluate_reference(std::span<const Expr> exprs, std::span<const std::vector<double>> points,
                              std::span<const std::string> names = {});

}  // namespace pg
