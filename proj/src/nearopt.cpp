#include "nearopt/nearopt.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nearopt/parallel.hpp"

namespace nearopt {

EpsilonVector::EpsilonVector(Vector values) : values_(std::move(values)) {
  for (Eigen::Index k = 0; k < values_.size(); ++k) {
    if (!(values_(k) >= 0.0) || !std::isfinite(values_(k))) {
      throw ModelError("epsilon coefficients must be finite and nonnegative");
    }
  }
}

EpsilonVector::EpsilonVector(std::initializer_list<Real> values)
    : EpsilonVector(Eigen::Map<const Vector>(values.begin(), static_cast<Eigen::Index>(values.size()))) {}

bool EpsilonVector::below_or_equal(const EpsilonVector& other) const {
  return size() == other.size() && (values_.array() <= other.values_.array()).all();
}

namespace {

void require_nonnegative(Real value, const std::string& what) {
  if (!std::isfinite(value) || value < 0.0) {
    std::ostringstream msg;
    msg << what << " is " << value << "; relative deviations need a finite nonnegative reference";
    throw ModelError(msg.str());
  }
}

}  // namespace

EpsilonSpace epsilon_space_single(const LinearProgram& lp, std::size_t objective, Real epsilon,
                                  const SolveOutcome& base) {
  if (!(epsilon >= 0.0)) throw ModelError("epsilon must be nonnegative");
  if (!base.optimal() || !base.objective_value) {
    throw ModelError("epsilon space needs a solved base optimum (got " + std::string(to_string(base.status)) + ")");
  }
  const LinearObjective& f = lp.objective(objective);
  const Real optimum = *base.objective_value;
  require_nonnegative(optimum, "optimum of '" + f.label + "'");
  EpsilonSpace space;
  space.cap = (1.0 + epsilon) * optimum;
  space.degenerate = optimum == 0.0;
  space.program = add_constraint(lp, objective_cap(f, space.cap, Sense::LessEqual, "epsilon-space:" + f.label));
  return space;
}

NecessaryConditionReport necessary_condition_single(const LinearProgram& lp, std::size_t objective, Real epsilon,
                                                    const Selector& selector, const SolverBackend& backend) {
  if (static_cast<std::size_t>(selector.size()) != lp.num_variables()) {
    throw ModelError("selector dimension does not match program");
  }
  const SolveOutcome base = solve(lp, objective, Direction::Minimize, backend);
  const EpsilonSpace space = epsilon_space_single(lp, objective, epsilon, base);

  const LinearProgram target = add_objective(space.program, selector.as_objective("condition"));
  SolveOutcome out = solve(target, target.num_objectives() - 1, Direction::Minimize, backend);
  if (!out.optimal()) {
    throw InvariantError("capped program is " + std::string(to_string(out.status)) +
                         " although it contains the optimum");
  }

  NecessaryConditionReport report;
  report.selector = selector;
  report.threshold = selector.apply(*out.point);
  report.anchor_minima = {report.threshold};
  report.witnesses = {std::move(*out.point)};
  report.epsilon = Vector::Constant(1, epsilon);
  report.front_size = 1;
  report.bound = BoundKind::ExactOptimum;
  if (space.degenerate) report.notes.push_back("zero optimum: space reduces to the argmin set");
  return report;
}

EpsilonBox epsilon_box(const LinearProgram& lp, const ParetoPoint& anchor, const EpsilonVector& epsilon) {
  const std::size_t n = lp.num_objectives();
  if (static_cast<std::size_t>(epsilon.size()) != n || static_cast<std::size_t>(anchor.objectives.size()) != n) {
    throw ModelError("epsilon box: arity mismatch between program, anchor and epsilon");
  }
  EpsilonBox box;
  box.caps = Vector(static_cast<Eigen::Index>(n));
  box.degenerate.assign(n, false);
  std::vector<LinearConstraint> rows;
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const LinearObjective& f = lp.objective(k);
    const Real value = anchor.objectives(i);
    require_nonnegative(value, "anchor value of '" + f.label + "'");
    if (value == 0.0) {
      box.degenerate[k] = true;
      box.caps(i) = 0.0;
      rows.push_back(objective_cap(f, 0.0, Sense::Equal, "box:" + f.label));
    } else {
      box.caps(i) = (1.0 + epsilon[i]) * value;
      rows.push_back(objective_cap(f, box.caps(i), Sense::LessEqual, "box:" + f.label));
    }
  }
  box.program = add_constraints(lp, std::move(rows));
  return box;
}

NecessaryConditionReport necessary_condition_multi(const LinearProgram& lp, std::span<const ParetoPoint> front,
                                                   const EpsilonVector& epsilon, const Selector& selector,
                                                   const SolverBackend& backend, std::size_t jobs) {
  if (front.empty()) throw ModelError("necessary_condition_multi: empty front");
  if (static_cast<std::size_t>(selector.size()) != lp.num_variables()) {
    throw ModelError("selector dimension does not match program");
  }

  const std::size_t m = front.size();
  std::vector<Real> minima(m);
  std::vector<Vector> witnesses(m);
  std::vector<bool> degenerate(m, false);

  parallel_for(m, jobs, [&](std::size_t i) {
    const EpsilonBox box = epsilon_box(lp, front[i], epsilon);
    const LinearProgram target = add_objective(box.program, selector.as_objective("condition"));
    SolveOutcome out = solve(target, target.num_objectives() - 1, Direction::Minimize, backend);
    if (!out.optimal()) {
      std::ostringstream msg;
      msg << "box around anchor " << i << " (" << front[i].objectives.transpose() << ") is "
          << to_string(out.status);
      throw InvariantError(msg.str());
    }
    minima[i] = selector.apply(*out.point);
    witnesses[i] = std::move(*out.point);
    degenerate[i] = std::find(box.degenerate.begin(), box.degenerate.end(), true) != box.degenerate.end();
  });

  NecessaryConditionReport report;
  report.selector = selector;
  report.winning_anchor = static_cast<std::size_t>(std::min_element(minima.begin(), minima.end()) - minima.begin());
  report.threshold = minima[report.winning_anchor];
  report.anchor_minima = std::move(minima);
  report.witnesses = std::move(witnesses);
  report.epsilon = epsilon.values();
  report.front_size = m;
  report.bound = BoundKind::UpperBound;
  for (std::size_t i = 0; i < m; ++i) {
    if (degenerate[i]) report.notes.push_back("anchor " + std::to_string(i) + " has a zero objective value");
  }
  return report;
}

std::vector<EpsilonVector> cross_product_grid(std::span<const Real> row_levels, std::span<const Real> column_levels) {
  std::vector<EpsilonVector> grid;
  grid.reserve(row_levels.size() * column_levels.size());
  for (Real r : row_levels) {
    for (Real c : column_levels) grid.emplace_back(EpsilonVector{r, c});
  }
  return grid;
}

SweepResult sweep(const LinearProgram& lp, std::span<const ParetoPoint> front, const std::vector<EpsilonVector>& grid,
                  const Selector& selector, const SolverBackend& backend, std::size_t jobs) {
  if (grid.empty()) throw ModelError("sweep: empty grid");
  SweepResult result;
  result.grid = grid;
  result.selector = selector;
  result.front_size = front.size();
  result.reports.resize(grid.size());

  parallel_for(grid.size(), jobs, [&](std::size_t cell) {
    try {
      result.reports[cell] = necessary_condition_multi(lp, front, grid[cell], selector, backend, 1);
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "sweep cell " << cell << " (eps = " << grid[cell].values().transpose() << "): " << e.what();
      throw InvariantError(msg.str());
    }
  });

  for (const auto& r : result.reports) result.thresholds.push_back(r.threshold);

  const Real tol = backend.tolerances().optimality;
  for (std::size_t a = 0; a < grid.size(); ++a) {
    for (std::size_t b = 0; b < grid.size(); ++b) {
      if (a == b || !grid[a].below_or_equal(grid[b])) continue;
      const Real slack = tol * std::max(1.0, std::abs(result.thresholds[a]));
      if (result.thresholds[b] > result.thresholds[a] + slack) {
        result.monotone = false;
        result.monotonicity_violations.emplace_back(a, b);
      }
    }
  }
  return result;
}

SweepResult sweep(const LinearProgram& lp, std::span<const ParetoPoint> front, std::span<const Real> row_levels,
                  std::span<const Real> column_levels, const Selector& selector, const SolverBackend& backend,
                  std::size_t jobs) {
  SweepResult result = sweep(lp, front, cross_product_grid(row_levels, column_levels), selector, backend, jobs);
  result.row_levels.assign(row_levels.begin(), row_levels.end());
  result.column_levels.assign(column_levels.begin(), column_levels.end());
  return result;
}

std::vector<Real> default_front_schedule() { return {0.0025, 0.005, 0.01, 0.025, 0.05, 0.075}; }

std::vector<Real> default_sweep_levels() { return {0.01, 0.02, 0.05, 0.10, 0.20, 0.50}; }

}  // namespace nearopt
