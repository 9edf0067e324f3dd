#pragma once

// Brute-force references that share no code path with the simplex: dense
// grid evaluation of the two quadratics used in the worked 1-D example and
// exhaustive vertex enumeration for tiny polyhedra.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "nearopt/lp.hpp"

namespace nearopt::oracle {

/// f1(x) = 10 (2x - 0.75)^2 + 2 and f2(x) = 10 (x - 0.75)^2 + 1.5 on [lo, hi].
struct ScalarFunctionPair {
  Real lower = 0.0;
  Real upper = 1.2;

  static Real f1(Real x) { return 10.0 * (2.0 * x - 0.75) * (2.0 * x - 0.75) + 2.0; }
  static Real f2(Real x) { return 10.0 * (x - 0.75) * (x - 0.75) + 1.5; }
  static Real value(int which, Real x) { return which == 0 ? f1(x) : f2(x); }

  static constexpr Real argmin_f1 = 0.375;
  static constexpr Real argmin_f2 = 0.75;
};

struct Interval {
  Real lower = 0.0;
  Real upper = 0.0;
};

struct GridResult {
  Real step = 0.0;
  std::vector<Interval> intervals;
  std::vector<Real> minimizers;  // grid argmin of each evaluated function

  Interval hull() const;
};

enum class Which { F1, F2, Both };

/// Sub-level set union {x | f_k(x) <= (1 + eps_k) f_k(a) for all k} over the
/// anchors a. With Which::F1 / F2 and no anchors this is the single-objective
/// space around the grid minimum. Which::Both requires anchors.
GridResult grid_epsilon_space(const ScalarFunctionPair& pair, Which which, const std::vector<Real>& epsilon,
                              const std::vector<Real>& anchors = {}, Real step = 1e-4);

enum class ParetoSpacing { ByF1, ByX, PrescribedX };

/// m objective tuples (f1, f2) on the efficient interval [0.375, 0.75].
/// ByX spaces x evenly, ByF1 spaces f1 evenly, PrescribedX evaluates `xs`.
std::vector<Eigen::Vector2d> grid_pareto(const ScalarFunctionPair& pair, std::size_t m, ParetoSpacing spacing,
                                         const std::vector<Real>& xs = {});

/// x values evenly spaced in [a, b], both included.
std::vector<Real> linspace(Real a, Real b, std::size_t m);

Real round_significant(Real value, int digits);

/// Piecewise-linear LP image of the pair: one weight per grid node summing
/// to one, x = sum w_i x_i, f_k = sum w_i f_k(x_i). Both functions are convex,
/// so any feasible x satisfies f_k(x) <= the LP value of f_k. Variable 0 is x.
LinearProgram quadratic_grid_program(const ScalarFunctionPair& pair, Real step = 1e-3);

/// Decision vector of `program` placing all weight on the node nearest to x.
Vector quadratic_grid_point(const LinearProgram& program, Real x);

// --- vertex enumeration ----------------------------------------------------

template <typename Scalar>
struct Hyperplanes {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> rows;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rhs;
  std::vector<Sense> senses;
};

template <typename Scalar>
Hyperplanes<Scalar> collect_hyperplanes(const LinearProgram& lp) {
  const auto n = static_cast<Eigen::Index>(lp.num_variables());
  std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> rows;
  std::vector<Scalar> rhs;
  std::vector<Sense> senses;
  for (const LinearConstraint& c : lp.constraints()) {
    if (!std::isfinite(c.rhs)) continue;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> a = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n);
    for (const Term& t : c.terms) a(static_cast<Eigen::Index>(t.index)) += Scalar(t.coefficient);
    rows.push_back(a);
    rhs.push_back(Scalar(c.rhs));
    senses.push_back(c.sense);
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const Variable& v = lp.variables()[static_cast<std::size_t>(j)];
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> e = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Unit(n, j);
    if (std::isfinite(v.lower)) {
      rows.push_back(e);
      rhs.push_back(Scalar(v.lower));
      senses.push_back(Sense::GreaterEqual);
    }
    if (std::isfinite(v.upper)) {
      rows.push_back(e);
      rhs.push_back(Scalar(v.upper));
      senses.push_back(Sense::LessEqual);
    }
  }
  Hyperplanes<Scalar> h;
  h.rows.resize(static_cast<Eigen::Index>(rows.size()), n);
  h.rhs.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    h.rows.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    h.rhs(static_cast<Eigen::Index>(i)) = rhs[i];
  }
  h.senses = std::move(senses);
  return h;
}

/// Every basic feasible point of {x | rows (senses) rhs}: all square
/// subsystems of n active hyperplanes (equalities always active) that have a
/// unique solution satisfying the remaining rows within `tolerance`.
template <typename Scalar>
std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> enumerate_vertices(const Hyperplanes<Scalar>& h,
                                                                         Eigen::Index n, Scalar tolerance) {
  using VectorS = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using MatrixS = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  std::vector<Eigen::Index> equalities, inequalities;
  for (Eigen::Index i = 0; i < h.rows.rows(); ++i) {
    (h.senses[static_cast<std::size_t>(i)] == Sense::Equal ? equalities : inequalities).push_back(i);
  }
  std::vector<VectorS> vertices;
  const Eigen::Index num_eq = static_cast<Eigen::Index>(equalities.size());
  if (num_eq > n) {
    // Overdetermined equalities: fall back to choosing n of them.
    inequalities.insert(inequalities.begin(), equalities.begin(), equalities.end());
    equalities.clear();
  }
  const Eigen::Index pick = n - static_cast<Eigen::Index>(equalities.size());
  const Eigen::Index pool = static_cast<Eigen::Index>(inequalities.size());
  if (pick < 0 || pick > pool) return vertices;

  auto feasible = [&](const VectorS& x) {
    for (Eigen::Index i = 0; i < h.rows.rows(); ++i) {
      const Scalar lhs = h.rows.row(i).dot(x);
      const Scalar scale = std::max(Scalar(1), Scalar(std::abs(h.rhs(i))));
      const Scalar r = (lhs - h.rhs(i)) / scale;
      switch (h.senses[static_cast<std::size_t>(i)]) {
        case Sense::GreaterEqual: if (r < -tolerance) return false; break;
        case Sense::LessEqual: if (r > tolerance) return false; break;
        case Sense::Equal: if (std::abs(r) > tolerance) return false; break;
      }
    }
    return true;
  };

  std::vector<Eigen::Index> choice(static_cast<std::size_t>(pick));
  for (Eigen::Index i = 0; i < pick; ++i) choice[static_cast<std::size_t>(i)] = i;
  MatrixS system(n, n);
  VectorS rhs(n);
  while (true) {
    Eigen::Index r = 0;
    for (Eigen::Index e : equalities) {
      system.row(r) = h.rows.row(e);
      rhs(r++) = h.rhs(e);
    }
    for (Eigen::Index c : choice) {
      const Eigen::Index row = inequalities[static_cast<std::size_t>(c)];
      system.row(r) = h.rows.row(row);
      rhs(r++) = h.rhs(row);
    }
    Eigen::FullPivLU<MatrixS> lu(system);
    if (lu.rank() == n) {
      const VectorS x = lu.solve(rhs);
      if (x.allFinite() && feasible(x)) vertices.push_back(x);
    }
    // next combination
    Eigen::Index i = pick - 1;
    while (i >= 0 && choice[static_cast<std::size_t>(i)] == pool - pick + i) --i;
    if (i < 0) break;
    ++choice[static_cast<std::size_t>(i)];
    for (Eigen::Index k = i + 1; k < pick; ++k) {
      choice[static_cast<std::size_t>(k)] = choice[static_cast<std::size_t>(k - 1)] + 1;
    }
  }
  return vertices;
}

/// Exact optimum of `objective` by enumerating vertices. Unboundedness is
/// detected by maximising the improvement rate over recession directions
/// normalised to the unit box, itself a vertex enumeration.
template <typename Scalar = Real>
SolveOutcome vertex_enumerate(const LinearProgram& lp, std::size_t objective,
                              Direction direction = Direction::Minimize, Scalar tolerance = Scalar(1e-9)) {
  using VectorS = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const auto n = static_cast<Eigen::Index>(lp.num_variables());
  const LinearObjective& f = lp.objective(objective);
  const Scalar sign = direction == Direction::Minimize ? Scalar(1) : Scalar(-1);
  const VectorS cost = sign * f.coefficients.cast<Scalar>();

  for (const LinearConstraint& c : lp.constraints()) {
    const bool vacuous = (c.sense == Sense::LessEqual && c.rhs == kInfinity) ||
                         (c.sense == Sense::GreaterEqual && c.rhs == -kInfinity);
    if (!std::isfinite(c.rhs) && !vacuous) return SolveOutcome{SolveStatus::Infeasible, {}, {}, 0};
  }

  const Hyperplanes<Scalar> h = collect_hyperplanes<Scalar>(lp);
  const auto vertices = enumerate_vertices<Scalar>(h, n, tolerance);
  if (vertices.empty()) return SolveOutcome{SolveStatus::Infeasible, {}, {}, 0};

  std::size_t best = 0;
  for (std::size_t v = 1; v < vertices.size(); ++v) {
    if (cost.dot(vertices[v]) < cost.dot(vertices[best])) best = v;
  }

  bool bounded_box = true;
  for (const Variable& v : lp.variables()) bounded_box = bounded_box && std::isfinite(v.lower) && std::isfinite(v.upper);
  if (!bounded_box) {
    // Recession cone: homogeneous rows, |d_j| <= 1; look for cost'd < 0.
    Hyperplanes<Scalar> cone;
    const Eigen::Index rows = h.rows.rows();
    cone.rows.resize(rows + 2 * n, n);
    cone.rhs = VectorS::Zero(rows + 2 * n);
    cone.rows.topRows(rows) = h.rows;
    cone.senses = h.senses;
    for (Eigen::Index j = 0; j < n; ++j) {
      cone.rows.row(rows + 2 * j) = VectorS::Unit(n, j).transpose();
      cone.rhs(rows + 2 * j) = Scalar(1);
      cone.senses.push_back(Sense::LessEqual);
      cone.rows.row(rows + 2 * j + 1) = VectorS::Unit(n, j).transpose();
      cone.rhs(rows + 2 * j + 1) = Scalar(-1);
      cone.senses.push_back(Sense::GreaterEqual);
    }
    for (const auto& d : enumerate_vertices<Scalar>(cone, n, tolerance)) {
      if (cost.dot(d) < -tolerance * std::max(Scalar(1), Scalar(cost.cwiseAbs().maxCoeff()))) {
        return SolveOutcome{SolveStatus::Unbounded, {}, {}, 0};
      }
    }
  }

  const Vector x = vertices[best].template cast<Real>();
  return SolveOutcome{SolveStatus::Optimal, x, evaluate(f, x), 0};
}

// --- random tiny programs --------------------------------------------------

struct TinyProgramOptions {
  std::size_t max_variables = 6;
  std::size_t max_rows = 6;
  Real box = 10.0;
};

/// Seeded random bounded program: every variable boxed in [-box, box] or
/// [0, box], rows with random senses; some instances are infeasible.
LinearProgram random_tiny_program(std::mt19937_64& rng, const TinyProgramOptions& options = {});

struct CorpusResult {
  std::size_t programs = 0;
  std::size_t agreements = 0;
  std::size_t infeasible = 0;
  Real worst_gap = 0.0;
  std::vector<std::string> disagreements;
};

/// Solves `count` seeded random programs with `backend` and with vertex
/// enumeration, comparing status and (relative to max(1, |value|)) value.
CorpusResult tiny_program_corpus(std::uint64_t seed, std::size_t count, const SolverBackend& backend,
                                 Real tolerance = 1e-6);

}  // namespace nearopt::oracle
