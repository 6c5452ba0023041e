#pragma once

#include <random>
#include <string>
#include <vector>

#include "pg/connection.hpp"

namespace pgtest {

using namespace pg;

inline std::vector<std::string> names(std::size_t dim, const std::string& stem = "x") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < dim; ++i) out.push_back(stem + std::to_string(i + 1));
  return out;
}

inline Chart box(std::size_t dim, double lo = -1.0, double hi = 1.0, const std::string& stem = "x") {
  return Chart{names(dim, stem), std::vector<Interval>(dim, Interval{lo, hi})};
}

inline Expr x(int i) { return Expr::variable(i); }

/// Random polynomial of total degree <= degree in `dim` variables. Coefficients
/// are multiples of 1/4 in [-2, 2] so expected values stay exact in tests.
class PolyGen {
 public:
  explicit PolyGen(std::uint64_t seed) : rng_(seed) {}

  double coeff() { return static_cast<double>(static_cast<int>(rng_() % 17) - 8) / 4.0; }

  Expr poly(std::size_t dim, int degree, int terms = 4) {
    Expr s;
    for (int t = 0; t < terms; ++t) {
      Expr mono(coeff());
      int left = static_cast<int>(rng_() % static_cast<unsigned>(degree + 1));
      while (left > 0) {
        mono = mono * x(static_cast<int>(rng_() % dim));
        --left;
      }
      s += mono;
    }
    return s;
  }

  OneForm form(std::size_t dim, int degree, int terms = 3) {
    OneForm w(dim);
    for (std::size_t i = 0; i < dim; ++i) w[i] = poly(dim, degree, terms);
    return w;
  }

  /// Constant 1-form with coefficients as above.
  OneForm constant_form(std::size_t dim) {
    OneForm w(dim);
    for (std::size_t i = 0; i < dim; ++i) w[i] = Expr(coeff());
    return w;
  }

  BivectorField bivector(std::size_t dim, int degree, int terms = 3) {
    BivectorField pi = BivectorField::zero(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = i + 1; j < dim; ++j) pi.set_upper(i, j, poly(dim, degree, terms));
    }
    return pi;
  }

  /// Diagonal positive cometric 1 + sum of squares + constant shift.
  Cometric cometric(std::size_t dim) {
    SquareField m(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      const Expr p = poly(dim, 1, 2);
      m(i, i) = Expr(1.5) + p * p;
    }
    // one small off-diagonal pair keeps the matrix non-diagonal but dominant
    if (dim >= 2) {
      const Expr c = Expr(0.25) * x(0);
      m(0, 1) = c;
      m(1, 0) = c;
    }
    return Cometric{m};
  }

 private:
  std::mt19937_64 rng_;
};

inline double max_abs(const SamplePlan& plan, const Expr& e) { return pg::max_abs(plan, std::span<const Expr>(&e, 1)); }

inline double max_abs(const SamplePlan& plan, const OneForm& w) { return pg::max_abs(plan, w.c); }

}  // namespace pgtest
