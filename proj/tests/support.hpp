#pragma once

// Test-only helpers. The brute-force solver below deliberately shares no code
// with the library: plain std::vector arithmetic, Gaussian elimination with
// partial pivoting, exhaustive choice of active rows.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nearopt/lp.hpp"

namespace testing_support {

struct DenseRow {
  std::vector<double> a;
  char sense;  // 'g' >=, 'l' <=, 'e' =
  double b;
};

struct BruteResult {
  bool feasible = false;
  double value = std::numeric_limits<double>::infinity();
  std::vector<double> point;
};

inline std::optional<std::vector<double>> gauss(std::vector<std::vector<double>> m, std::vector<double> r) {
  const std::size_t n = r.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t i = c + 1; i < n; ++i) {
      if (std::abs(m[i][c]) > std::abs(m[p][c])) p = i;
    }
    if (std::abs(m[p][c]) < 1e-12) return std::nullopt;
    std::swap(m[p], m[c]);
    std::swap(r[p], r[c]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c) continue;
      const double f = m[i][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[i][k] -= f * m[c][k];
      r[i] -= f * r[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = r[i] / m[i][i];
  return x;
}

/// min c.x over a bounded polyhedron given as dense rows (bounds included).
inline BruteResult brute_force_min(const std::vector<double>& c, const std::vector<DenseRow>& rows,
                                   double tol = 1e-9) {
  const std::size_t n = c.size();
  BruteResult best;
  std::vector<std::size_t> pick(n);
  for (std::size_t i = 0; i < n; ++i) pick[i] = i;
  if (rows.size() < n) return best;
  while (true) {
    std::vector<std::vector<double>> m;
    std::vector<double> r;
    for (std::size_t i : pick) {
      m.push_back(rows[i].a);
      r.push_back(rows[i].b);
    }
    if (auto x = gauss(m, r)) {
      bool ok = true;
      for (const DenseRow& row : rows) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < n; ++j) lhs += row.a[j] * (*x)[j];
        const double s = std::max(1.0, std::abs(row.b));
        if ((row.sense == 'g' && lhs < row.b - tol * s) || (row.sense == 'l' && lhs > row.b + tol * s) ||
            (row.sense == 'e' && std::abs(lhs - row.b) > tol * s)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        double v = 0.0;
        for (std::size_t j = 0; j < n; ++j) v += c[j] * (*x)[j];
        if (!best.feasible || v < best.value) {
          best = {true, v, *x};
        }
      }
    }
    std::size_t i = n;
    while (i > 0 && pick[i - 1] == rows.size() - n + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t k = i; k < n; ++k) pick[k] = pick[k - 1] + 1;
  }
  return best;
}

/// Dense rows of a LinearProgram (bounds as extra rows) for the brute force.
inline std::vector<DenseRow> dense_rows(const nearopt::LinearProgram& lp) {
  const std::size_t n = lp.num_variables();
  std::vector<DenseRow> rows;
  for (const auto& c : lp.constraints()) {
    if (!std::isfinite(c.rhs)) continue;
    DenseRow r{std::vector<double>(n, 0.0), 'g', c.rhs};
    for (const auto& t : c.terms) r.a[t.index] += t.coefficient;
    r.sense = c.sense == nearopt::Sense::GreaterEqual ? 'g' : (c.sense == nearopt::Sense::LessEqual ? 'l' : 'e');
    rows.push_back(r);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    const auto& v = lp.variables()[j];
    if (std::isfinite(v.lower)) rows.push_back({e, 'g', v.lower});
    if (std::isfinite(v.upper)) rows.push_back({e, 'l', v.upper});
  }
  return rows;
}

inline std::vector<double> to_std(const nearopt::Vector& v) { return {v.data(), v.data() + v.size()}; }

/// min x1 + x2 s.t. x1 + 2 x2 >= 2, x >= 0 (both objectives optional).
inline nearopt::LinearProgram min_sum_program(double upper = nearopt::kInfinity) {
  using namespace nearopt;
  return LinearProgram({{"x1", 0.0, upper}, {"x2", 0.0, upper}},
                       {{{{0, 1.0}, {1, 2.0}}, Sense::GreaterEqual, 2.0, "cover"}},
                       {{(Vector(2) << 1.0, 1.0).finished(), 0.0, "sum"}});
}

/// x in [0,1]^3, x1 + x2 + x3 >= 1.5, f1 = x1 + 2 x2 + 3 x3, f2 = 3 x1 + 2 x2 + x3.
/// f1 + f2 = 4 (x1 + x2 + x3), so every point of the face sum = 1.5 is efficient
/// and the front in objective space is the segment f1 + f2 = 6, f1 in [2, 4].
inline nearopt::LinearProgram three_variable_program() {
  using namespace nearopt;
  return LinearProgram({{"x1", 0.0, 1.0}, {"x2", 0.0, 1.0}, {"x3", 0.0, 1.0}},
                       {{{{0, 1.0}, {1, 1.0}, {2, 1.0}}, Sense::GreaterEqual, 1.5, "cover"}},
                       {{(Vector(3) << 1.0, 2.0, 3.0).finished(), 0.0, "f1"},
                        {(Vector(3) << 3.0, 2.0, 1.0).finished(), 0.0, "f2"}});
}

/// Union of the boxes around every front point as one program over (x, s),
/// s = f1 of the anchor: f1(x) <= (1 + e1) s, f2(x) <= (1 + e2)(6 - s), s in [2, 4].
/// The box caps are linear in s, so min d'x over this program is the exact
/// minimum over the union. Objective 0 is d'x.
inline nearopt::LinearProgram three_variable_union(double e1, double e2, const std::vector<double>& d) {
  using namespace nearopt;
  return LinearProgram({{"x1", 0.0, 1.0}, {"x2", 0.0, 1.0}, {"x3", 0.0, 1.0}, {"s", 2.0, 4.0}},
                       {{{{0, 1.0}, {1, 1.0}, {2, 1.0}}, Sense::GreaterEqual, 1.5, "cover"},
                        {{{0, 1.0}, {1, 2.0}, {2, 3.0}, {3, -(1.0 + e1)}}, Sense::LessEqual, 0.0, "cap1"},
                        {{{0, 3.0}, {1, 2.0}, {2, 1.0}, {3, 1.0 + e2}}, Sense::LessEqual, 6.0 * (1.0 + e2), "cap2"}},
                       {{(Vector(4) << d[0], d[1], d[2], 0.0).finished(), 0.0, "d"}});
}

inline std::string fixture_path() { return NEAROPT_FIXTURE; }

}  // namespace testing_support
