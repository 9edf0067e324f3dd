#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nearopt/conditions.hpp"
#include "nearopt/lp.hpp"
#include "nearopt/pareto.hpp"

namespace nearopt {

/// Per-objective relative suboptimality coefficients (0.05 = 5%).
class EpsilonVector {
 public:
  EpsilonVector() = default;
  explicit EpsilonVector(Vector values);
  EpsilonVector(std::initializer_list<Real> values);

  const Vector& values() const { return values_; }
  Eigen::Index size() const { return values_.size(); }
  Real operator[](Eigen::Index k) const { return values_(k); }

  /// Componentwise <=.
  bool below_or_equal(const EpsilonVector& other) const;

 private:
  Vector values_;
};

/// The capped program {x | f(x) <= (1 + eps) f(x*)}.
struct EpsilonSpace {
  LinearProgram program;
  Real cap = 0.0;
  bool degenerate = false;  // f(x*) = 0: the space collapses to the argmin set
};

EpsilonSpace epsilon_space_single(const LinearProgram& lp, std::size_t objective, Real epsilon,
                                  const SolveOutcome& base);

/// Exact non-implied threshold c* = min d'x over the single-objective space.
NecessaryConditionReport necessary_condition_single(const LinearProgram& lp, std::size_t objective, Real epsilon,
                                                    const Selector& selector,
                                                    const SolverBackend& backend = default_backend());

/// lp plus one row f_k(x) <= (1 + eps_k) f_k(anchor) per objective. A zero
/// anchor value gives an equality-to-zero row and is flagged.
struct EpsilonBox {
  LinearProgram program;
  Vector caps;
  std::vector<bool> degenerate;
};

EpsilonBox epsilon_box(const LinearProgram& lp, const ParetoPoint& anchor, const EpsilonVector& epsilon);

/// Upper bound c~ = min over anchors of min d'x over each anchor's box.
/// Ties between anchors report the lowest-index witness.
NecessaryConditionReport necessary_condition_multi(const LinearProgram& lp, std::span<const ParetoPoint> front,
                                                   const EpsilonVector& epsilon, const Selector& selector,
                                                   const SolverBackend& backend = default_backend(),
                                                   std::size_t jobs = 1);

struct SweepResult {
  std::vector<EpsilonVector> grid;
  std::vector<Real> thresholds;
  std::vector<NecessaryConditionReport> reports;
  Selector selector;
  std::size_t front_size = 0;
  // Set when the grid is a 2-D cross product: cell (r, c) = r * cols + c.
  std::vector<Real> row_levels;
  std::vector<Real> column_levels;
  bool monotone = true;
  std::vector<std::pair<std::size_t, std::size_t>> monotonicity_violations;
};

/// Full cross product of per-objective levels for two objectives; the first
/// objective indexes rows.
std::vector<EpsilonVector> cross_product_grid(std::span<const Real> row_levels, std::span<const Real> column_levels);

SweepResult sweep(const LinearProgram& lp, std::span<const ParetoPoint> front, const std::vector<EpsilonVector>& grid,
                  const Selector& selector, const SolverBackend& backend = default_backend(), std::size_t jobs = 1);

SweepResult sweep(const LinearProgram& lp, std::span<const ParetoPoint> front, std::span<const Real> row_levels,
                  std::span<const Real> column_levels, const Selector& selector,
                  const SolverBackend& backend = default_backend(), std::size_t jobs = 1);

/// The six percentages used for fronts and for sweep grids by default.
std::vector<Real> default_front_schedule();
std::vector<Real> default_sweep_levels();

}  // namespace nearopt
