#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pg/expr.hpp"
#include "pg/tape.hpp"

namespace pg {

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Ordered coordinate names with a closed box domain.
struct Chart {
  std::vector<std::string> coords;
  std::vector<Interval> domain;

  std::size_t dim() const { return coords.size(); }
  void validate() const;
};

/// dim x dim block of expressions, row-major.
class SquareField {
 public:
  SquareField() = default;
  explicit SquareField(std::size_t dim) : dim_(dim), data_(dim * dim) {}

  std::size_t dim() const { return dim_; }
  Expr& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
  const Expr& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
  std::span<const Expr> flat() const { return data_; }

  static SquareField identity(std::size_t dim);

 private:
  std::size_t dim_ = 0;
  std::vector<Expr> data_;
};

/// Components g^{ij} = g(dx^i, dx^j) of an inner product on 1-forms.
struct Cometric {
  SquareField m;
  std::size_t dim() const { return m.dim(); }
  const Expr& operator()(std::size_t i, std::size_t j) const { return m(i, j); }
};

/// Components g~_{ij} of the metric on vectors; matrix inverse of a Cometric.
struct CovariantMetric {
  SquareField m;
  std::size_t dim() const { return m.dim(); }
  const Expr& operator()(std::size_t i, std::size_t j) const { return m(i, j); }
};

/// Components Pi^{ij} = Pi(dx^i, dx^j); antisymmetric by construction when
/// built from an upper triangle.
struct BivectorField {
  SquareField m;
  std::size_t dim() const { return m.dim(); }
  const Expr& operator()(std::size_t i, std::size_t j) const { return m(i, j); }

  static BivectorField zero(std::size_t dim) { return {SquareField(dim)}; }
  /// Sets Pi^{ij} = e and Pi^{ji} = -e for i < j.
  void set_upper(std::size_t i, std::size_t j, const Expr& e);
};

/// eta = sum_i eta_i dx^i.
struct OneForm {
  std::vector<Expr> c;

  OneForm() = default;
  explicit OneForm(std::size_t dim) : c(dim) {}
  explicit OneForm(std::vector<Expr> comps) : c(std::move(comps)) {}

  std::size_t dim() const { return c.size(); }
  Expr& operator[](std::size_t i) { return c[i]; }
  const Expr& operator[](std::size_t i) const { return c[i]; }

  static OneForm basis(std::size_t dim, std::size_t i);
};

OneForm operator+(const OneForm& a, const OneForm& b);
OneForm operator-(const OneForm& a, const OneForm& b);
OneForm operator*(const Expr& s, const OneForm& a);

/// Exterior derivative of a scalar field.
OneForm d(const Expr& f, std::size_t dim);

/// Deterministic interior sample points for a chart.
struct SamplePlan {
  std::uint64_t seed = 0;
  std::size_t count = 0;
  std::vector<std::vector<double>> points;
  std::vector<std::string> names;  // coordinate names, for error messages
};

/// `count` points from a seeded uniform generator, each pulled 1% toward the
/// domain centre.
SamplePlan sample_plan(const Chart& chart, std::uint64_t seed, std::size_t count);

/// Evaluates all expressions at every plan point (parallel kernel).
ValueTable sample(const SamplePlan& plan, std::span<const Expr> exprs);

/// max over points and expressions of |value|; 0 for an empty list.
double max_abs(const SamplePlan& plan, std::span<const Expr> exprs);

/// sum_{ij} g^{ij} a_i b_j
Expr pair_g(const Cometric& g, const OneForm& a, const OneForm& b);
/// sum_{ij} Pi^{ij} a_i b_j
Expr pair_pi(const BivectorField& pi, const OneForm& a, const OneForm& b);
/// sum_{ij} m_{ij} a_i b_j for any square block.
Expr contract(const SquareField& m, const OneForm& a, const OneForm& b);

Expr determinant(const SquareField& m);

/// Symbolic adjugate inverse (dim <= 4). When a plan is given, the inverse
/// is checked at every point; a vanishing determinant or a product further
/// than 1e-10 from the identity raises GeometryError naming the point.
CovariantMetric invert_cometric(const Cometric& g, const SamplePlan* plan = nullptr);

/// The reverse direction, used to check that inversion is an involution.
Cometric invert_metric(const CovariantMetric& gl);

/// Numeric symmetry and positive definiteness (Cholesky) at every point.
void validate_cometric(const Cometric& g, const SamplePlan& plan, double tol = 1e-10);

/// max |Pi^{ij} + Pi^{ji}| over the plan.
double antisymmetry_residual(const BivectorField& pi, const SamplePlan& plan);

std::string format_point(std::span<const double> p);

}  // namespace pg
