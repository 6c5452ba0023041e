#include "pg/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace pg {

void Chart::validate() const {
  if (coords.empty()) throw GeometryError("chart must have at least one coordinate");
  if (domain.size() != coords.size()) throw GeometryError("chart domain does not cover every coordinate");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (!seen.insert(coords[i]).second) throw GeometryError("duplicate coordinate name '" + coords[i] + "'");
    if (!(domain[i].lo < domain[i].hi)) throw GeometryError("empty domain for coordinate '" + coords[i] + "'");
  }
}

SquareField SquareField::identity(std::size_t dim) {
  SquareField m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = Expr(1.0);
  return m;
}

void BivectorField::set_upper(std::size_t i, std::size_t j, const Expr& e) {
  if (i >= j) throw GeometryError("bivector entries are given on the strict upper triangle");
  m(i, j) = e;
  m(j, i) = -e;
}

OneForm OneForm::basis(std::size_t dim, std::size_t i) {
  OneForm w(dim);
  w[i] = Expr(1.0);
  return w;
}

OneForm operator+(const OneForm& a, const OneForm& b) {
  OneForm r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) r[i] = a[i] + b[i];
  return r;
}

OneForm operator-(const OneForm& a, const OneForm& b) {
  OneForm r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) r[i] = a[i] - b[i];
  return r;
}

OneForm operator*(const Expr& s, const OneForm& a) {
  OneForm r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) r[i] = s * a[i];
  return r;
}

OneForm d(const Expr& f, std::size_t dim) {
  OneForm r(dim);
  for (std::size_t i = 0; i < dim; ++i) r[i] = diff(f, static_cast<int>(i));
  return r;
}

SamplePlan sample_plan(const Chart& chart, std::uint64_t seed, std::size_t count) {
  chart.validate();
  if (count < 1) throw GeometryError("sample count must be at least 1");
  // mt19937_64 has a fixed output sequence, and the 53-bit mantissa mapping
  // below avoids the implementation-defined uniform_real_distribution.
  std::mt19937_64 rng(seed);
  SamplePlan plan{seed, count, {}, chart.coords};
  plan.points.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    std::vector<double> p(chart.dim());
    for (std::size_t i = 0; i < chart.dim(); ++i) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      const auto [lo, hi] = chart.domain[i];
      const double centre = 0.5 * (lo + hi);
      p[i] = centre + 0.99 * ((lo + u * (hi - lo)) - centre);
    }
    plan.points.push_back(std::move(p));
  }
  return plan;
}

ValueTable sample(const SamplePlan& plan, std::span<const Expr> exprs) {
  return evaluate(Tape(exprs, plan.names), plan.points);
}

double max_abs(const SamplePlan& plan, std::span<const Expr> exprs) {
  if (exprs.empty()) return 0.0;
  const ValueTable t = sample(plan, exprs);
  double m = 0.0;
  for (double v : t.data) m = std::max(m, std::abs(v));
  return m;
}

Expr contract(const SquareField& m, const OneForm& a, const OneForm& b) {
  Expr s;
  for (std::size_t i = 0; i < m.dim(); ++i) {
    if (a[i].is_zero()) continue;
    Expr row;
    for (std::size_t j = 0; j < m.dim(); ++j) row += m(i, j) * b[j];
    s += a[i] * row;
  }
  return s;
}

Expr pair_g(const Cometric& g, const OneForm& a, const OneForm& b) { return contract(g.m, a, b); }

Expr pair_pi(const BivectorField& pi, const OneForm& a, const OneForm& b) { return contract(pi.m, a, b); }

namespace {

// Laplace expansion along the first row of the sub-matrix selected by rows/cols.
Expr minor_det(const SquareField& m, std::vector<std::size_t> rows, std::vector<std::size_t> cols) {
  if (rows.size() == 1) return m(rows[0], cols[0]);
  Expr total;
  const std::size_t r = rows.front();
  std::vector<std::size_t> sub_rows(rows.begin() + 1, rows.end());
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const Expr& entry = m(r, cols[k]);
    if (entry.is_zero()) continue;
    std::vector<std::size_t> sub_cols;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c != k) sub_cols.push_back(cols[c]);
    }
    const Expr term = entry * minor_det(m, sub_rows, sub_cols);
    total = (k % 2 == 0) ? total + term : total - term;
  }
  return total;
}

std::vector<std::size_t> all_but(std::size_t n, std::size_t skip) {
  std::vector<std::size_t> v;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != skip) v.push_back(i);
  }
  return v;
}

SquareField adjugate_inverse(const SquareField& m) {
  const std::size_t n = m.dim();
  if (n == 0 || n > 4) throw GeometryError("symbolic inversion supports dimensions 1 to 4");
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  const Expr det = minor_det(m, idx, idx);
  SquareField inv(n);
  if (n == 1) {
    inv(0, 0) = Expr(1.0) / det;
    return inv;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      // inv_{ij} = cofactor_{ji} / det
      Expr cof = minor_det(m, all_but(n, j), all_but(n, i));
      if ((i + j) % 2 == 1) cof = -cof;
      inv(i, j) = cof / det;
    }
  }
  return inv;
}

void check_inverse(const SquareField& m, const SquareField& inv, const SamplePlan& plan) {
  const std::size_t n = m.dim();
  std::vector<Expr> exprs(m.flat().begin(), m.flat().end());
  exprs.insert(exprs.end(), inv.flat().begin(), inv.flat().end());
  ValueTable t;
  try {
    t = sample(plan, exprs);
  } catch (const SampleError& e) {
    throw GeometryError("cometric is singular at point " + format_point(e.point()) + ": " + e.what());
  }
  for (std::size_t r = 0; r < t.rows; ++r) {
    auto row = t.row(r);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += row[i * n + j] * row[n * n + j * n + k];
        worst = std::max(worst, std::abs(s - (i == k ? 1.0 : 0.0)));
      }
    }
    if (worst > 1e-10) {
      throw GeometryError("cometric is numerically singular at point " + format_point(plan.points[r]) +
                          " (|g g~ - I| = " + std::to_string(worst) + ")");
    }
  }
}

}  // namespace

Expr determinant(const SquareField& m) {
  std::vector<std::size_t> idx(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) idx[i] = i;
  return minor_det(m, idx, idx);
}

CovariantMetric invert_cometric(const Cometric& g, const SamplePlan* plan) {
  CovariantMetric gl{adjugate_inverse(g.m)};
  if (plan) check_inverse(g.m, gl.m, *plan);
  return gl;
}

Cometric invert_metric(const CovariantMetric& gl) { return Cometric{adjugate_inverse(gl.m)}; }

void validate_cometric(const Cometric& g, const SamplePlan& plan, double tol) {
  const std::size_t n = g.dim();
  const ValueTable t = sample(plan, g.m.flat());
  for (std::size_t r = 0; r < t.rows; ++r) {
    auto a = t.row(r);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (std::abs(a[i * n + j] - a[j * n + i]) > tol) {
          throw GeometryError("cometric is not symmetric at point " + format_point(plan.points[r]));
        }
      }
    }
    // Cholesky on the symmetric part.
    std::vector<double> l(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double s = a[j * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= l[j * n + k] * l[j * n + k];
      if (s <= tol) throw GeometryError("cometric is not positive definite at point " + format_point(plan.points[r]));
      l[j * n + j] = std::sqrt(s);
      for (std::size_t i = j + 1; i < n; ++i) {
        double v = 0.5 * (a[i * n + j] + a[j * n + i]);
        for (std::size_t k = 0; k < j; ++k) v -= l[i * n + k] * l[j * n + k];
        l[i * n + j] = v / l[j * n + j];
      }
    }
  }
}

double antisymmetry_residual(const BivectorField& pi, const SamplePlan& plan) {
  std::vector<Expr> sums;
  for (std::size_t i = 0; i < pi.dim(); ++i) {
    for (std::size_t j = i; j < pi.dim(); ++j) sums.push_back(pi(i, j) + pi(j, i));
  }
  return max_abs(plan, sums);
}

std::string format_point(std::span<const double> p) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ')';
  return os.str();
}

}  // namespace pg
