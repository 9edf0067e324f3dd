#include "nearopt/lp.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "nearopt/simplex.hpp"

namespace nearopt {

std::string_view to_string(Sense sense) {
  switch (sense) {
    case Sense::GreaterEqual: return ">=";
    case Sense::LessEqual: return "<=";
    case Sense::Equal: return "=";
  }
  return "?";
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
  }
  return "?";
}

namespace {

std::string row_label(const LinearConstraint& row, std::size_t i) {
  return row.name.empty() ? "constraint #" + std::to_string(i) : "constraint '" + row.name + "'";
}

void validate_row(const LinearConstraint& row, std::size_t i, std::size_t num_variables) {
  if (row.terms.empty()) throw ModelError(row_label(row, i) + " has no terms");
  std::unordered_set<std::size_t> seen;
  bool nonzero = false;
  for (const Term& t : row.terms) {
    if (t.index >= num_variables) {
      throw ModelError(row_label(row, i) + " references variable index " + std::to_string(t.index) +
                       " out of range");
    }
    if (!seen.insert(t.index).second) {
      throw ModelError(row_label(row, i) + " repeats variable index " + std::to_string(t.index));
    }
    if (!std::isfinite(t.coefficient)) throw ModelError(row_label(row, i) + " has a non-finite coefficient");
    nonzero = nonzero || t.coefficient != 0.0;
  }
  if (!nonzero) throw ModelError(row_label(row, i) + " has only zero coefficients");
  if (std::isnan(row.rhs)) throw ModelError(row_label(row, i) + " has a NaN rhs");
  if (row.sense == Sense::Equal && !std::isfinite(row.rhs)) {
    throw ModelError(row_label(row, i) + " is an equality with infinite rhs");
  }
}

}  // namespace

LinearProgram::LinearProgram(std::vector<Variable> variables,
                             std::vector<LinearConstraint> constraints,
                             std::vector<LinearObjective> objectives)
    : variables_(std::move(variables)),
      constraints_(std::move(constraints)),
      objectives_(std::move(objectives)) {
  std::set<std::string> names;
  for (const Variable& v : variables_) {
    if (v.name.empty()) throw ModelError("variable with empty name");
    if (!names.insert(v.name).second) throw ModelError("duplicate variable name '" + v.name + "'");
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper) {
      throw ModelError("variable '" + v.name + "' has lower > upper");
    }
    if (v.lower == kInfinity || v.upper == -kInfinity) {
      throw ModelError("variable '" + v.name + "' has an empty domain");
    }
  }
  for (std::size_t i = 0; i < constraints_.size(); ++i) validate_row(constraints_[i], i, variables_.size());
  if (objectives_.empty()) throw ModelError("program needs at least one objective");
  for (const LinearObjective& f : objectives_) {
    if (static_cast<std::size_t>(f.coefficients.size()) != variables_.size()) {
      throw ModelError("objective '" + f.label + "' has " + std::to_string(f.coefficients.size()) +
                       " coefficients for " + std::to_string(variables_.size()) + " variables");
    }
    if (!f.coefficients.allFinite() || !std::isfinite(f.offset)) {
      throw ModelError("objective '" + f.label + "' has non-finite data");
    }
  }
}

const LinearObjective& LinearProgram::objective(std::size_t k) const {
  if (k >= objectives_.size()) {
    throw ModelError("objective index " + std::to_string(k) + " out of range (" +
                     std::to_string(objectives_.size()) + " objectives)");
  }
  return objectives_[k];
}

std::optional<std::size_t> LinearProgram::variable_index(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> LinearProgram::objective_index(std::string_view label) const {
  for (std::size_t i = 0; i < objectives_.size(); ++i) {
    if (objectives_[i].label == label) return i;
  }
  return std::nullopt;
}

// --- standard form -------------------------------------------------------

namespace {

// x_j = shift + sign * y[col]  (- y[col + 1] when split)
struct ColumnMap {
  Eigen::Index col = 0;
  Real shift = 0.0;
  Real sign = 1.0;
  bool split = false;
};

struct Conversion {
  simplex::StandardForm<Real> form;
  std::vector<ColumnMap> columns;
  bool trivially_infeasible = false;
};

struct PendingRow {
  std::vector<std::pair<Eigen::Index, Real>> entries;
  Sense sense;
  Real rhs;
};

Conversion to_standard_form(const LinearProgram& lp, const LinearObjective& objective, Real direction) {
  Conversion conv;
  const auto& vars = lp.variables();
  Eigen::Index num_cols = 0;
  std::vector<PendingRow> rows;
  conv.columns.resize(vars.size());

  for (std::size_t j = 0; j < vars.size(); ++j) {
    const Variable& v = vars[j];
    ColumnMap& map = conv.columns[j];
    map.col = num_cols;
    if (std::isfinite(v.lower)) {
      map.shift = v.lower;
      ++num_cols;
      if (std::isfinite(v.upper)) rows.push_back({{{map.col, 1.0}}, Sense::LessEqual, v.upper - v.lower});
    } else if (std::isfinite(v.upper)) {
      map.shift = v.upper;
      map.sign = -1.0;
      ++num_cols;
    } else {
      map.split = true;
      num_cols += 2;
    }
  }

  for (const LinearConstraint& c : lp.constraints()) {
    if ((c.sense == Sense::LessEqual && c.rhs == kInfinity) ||
        (c.sense == Sense::GreaterEqual && c.rhs == -kInfinity)) {
      continue;  // vacuous
    }
    if (!std::isfinite(c.rhs)) {
      conv.trivially_infeasible = true;
      continue;
    }
    PendingRow row{{}, c.sense, c.rhs};
    for (const Term& t : c.terms) {
      const ColumnMap& map = conv.columns[t.index];
      row.rhs -= t.coefficient * map.shift;
      row.entries.emplace_back(map.col, t.coefficient * map.sign);
      if (map.split) row.entries.emplace_back(map.col + 1, -t.coefficient);
    }
    rows.push_back(std::move(row));
  }

  // Normalise to b >= 0 and count slack/surplus columns.
  Eigen::Index num_slack = 0;
  for (PendingRow& row : rows) {
    if (row.rhs < 0.0) {
      row.rhs = -row.rhs;
      for (auto& e : row.entries) e.second = -e.second;
      if (row.sense == Sense::LessEqual) row.sense = Sense::GreaterEqual;
      else if (row.sense == Sense::GreaterEqual) row.sense = Sense::LessEqual;
    }
    if (row.sense != Sense::Equal) ++num_slack;
  }

  const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index n = num_cols + num_slack;
  auto& form = conv.form;
  form.A = Matrix::Zero(m, n);
  form.b = Vector::Zero(m);
  form.c = Vector::Zero(n);
  form.initial_basis.assign(m, -1);

  Eigen::Index slack = num_cols;
  for (Eigen::Index r = 0; r < m; ++r) {
    const PendingRow& row = rows[r];
    for (const auto& [col, value] : row.entries) form.A(r, col) += value;
    form.b(r) = row.rhs;
    if (row.sense == Sense::LessEqual) {
      form.A(r, slack) = 1.0;
      form.initial_basis[r] = slack;
      ++slack;
    } else if (row.sense == Sense::GreaterEqual) {
      form.A(r, slack) = -1.0;
      ++slack;
    }
  }

  for (std::size_t j = 0; j < vars.size(); ++j) {
    const ColumnMap& map = conv.columns[j];
    const Real cj = direction * objective.coefficients(static_cast<Eigen::Index>(j));
    form.c(map.col) = cj * map.sign;
    if (map.split) form.c(map.col + 1) = -cj;
  }
  return conv;
}

Vector recover_point(const Conversion& conv, const Vector& y) {
  Vector x(static_cast<Eigen::Index>(conv.columns.size()));
  for (std::size_t j = 0; j < conv.columns.size(); ++j) {
    const ColumnMap& map = conv.columns[j];
    Real value = map.shift + map.sign * y(map.col);
    if (map.split) value -= y(map.col + 1);
    x(static_cast<Eigen::Index>(j)) = value;
  }
  return x;
}

}  // namespace

SolveOutcome DenseSimplexBackend::solve(const LinearProgram& lp, std::size_t objective,
                                        Direction direction) const {
  const LinearObjective& f = lp.objective(objective);
  const Real sign = direction == Direction::Minimize ? 1.0 : -1.0;
  const Conversion conv = to_standard_form(lp, f, sign);

  SolveOutcome outcome;
  if (conv.trivially_infeasible) {
    outcome.status = SolveStatus::Infeasible;
    return outcome;
  }

  simplex::Options<Real> options;
  options.feasibility_tolerance = tolerances_.feasibility;
  const auto result = simplex::solve(conv.form, options);
  outcome.pivots = result.pivots;
  switch (result.status) {
    case simplex::Status::Infeasible: outcome.status = SolveStatus::Infeasible; return outcome;
    case simplex::Status::Unbounded: outcome.status = SolveStatus::Unbounded; return outcome;
    case simplex::Status::Optimal: break;
  }
  Vector x = recover_point(conv, result.y);
  const Real violation = max_violation(lp, x);
  if (violation > tolerances_.feasibility) {
    throw InvariantError("simplex returned a point violating the program by " + std::to_string(violation));
  }
  outcome.status = SolveStatus::Optimal;
  outcome.objective_value = evaluate(f, x);
  outcome.point = std::move(x);
  return outcome;
}

std::string DenseSimplexBackend::name() const { return "nearopt-dense-simplex/bland/1"; }

const SolverBackend& default_backend() {
  static const DenseSimplexBackend backend;
  return backend;
}

SolveOutcome solve(const LinearProgram& lp, std::size_t objective, Direction direction,
                   const SolverBackend& backend) {
  return backend.solve(lp, objective, direction);
}

// --- program transformations ---------------------------------------------

LinearProgram add_constraint(const LinearProgram& lp, LinearConstraint constraint) {
  std::vector<LinearConstraint> rows;
  rows.push_back(std::move(constraint));
  return add_constraints(lp, std::move(rows));
}

LinearProgram add_constraints(const LinearProgram& lp, std::vector<LinearConstraint> rows) {
  auto constraints = lp.constraints();
  constraints.reserve(constraints.size() + rows.size());
  for (auto& r : rows) constraints.push_back(std::move(r));
  return LinearProgram(lp.variables(), std::move(constraints), lp.objectives());
}

LinearProgram add_objective(const LinearProgram& lp, LinearObjective objective) {
  auto objectives = lp.objectives();
  objectives.push_back(std::move(objective));
  return LinearProgram(lp.variables(), lp.constraints(), std::move(objectives));
}

Real evaluate(const LinearObjective& objective, const Vector& point) {
  if (point.size() != objective.coefficients.size()) {
    throw ModelError("evaluate: point has dimension " + std::to_string(point.size()) + ", objective expects " +
                     std::to_string(objective.coefficients.size()));
  }
  return objective.coefficients.dot(point) + objective.offset;
}

Vector evaluate_all(const LinearProgram& lp, const Vector& point) {
  Vector values(static_cast<Eigen::Index>(lp.num_objectives()));
  for (std::size_t k = 0; k < lp.num_objectives(); ++k) {
    values(static_cast<Eigen::Index>(k)) = evaluate(lp.objective(k), point);
  }
  return values;
}

LinearConstraint objective_cap(const LinearObjective& objective, Real cap, Sense sense, std::string name) {
  LinearConstraint row;
  row.sense = sense;
  row.rhs = cap - objective.offset;
  row.name = name.empty() ? "cap:" + objective.label : std::move(name);
  for (Eigen::Index j = 0; j < objective.coefficients.size(); ++j) {
    if (objective.coefficients(j) != 0.0) {
      row.terms.push_back({static_cast<std::size_t>(j), objective.coefficients(j)});
    }
  }
  if (row.terms.empty()) throw ModelError("cannot cap constant objective '" + objective.label + "'");
  return row;
}

Real residual(const LinearConstraint& row, const Vector& point) {
  Real lhs = 0.0;
  for (const Term& t : row.terms) lhs += t.coefficient * point(static_cast<Eigen::Index>(t.index));
  return lhs - row.rhs;
}

Real max_violation(const LinearProgram& lp, const Vector& point) {
  if (static_cast<std::size_t>(point.size()) != lp.num_variables()) {
    throw ModelError("point dimension does not match program");
  }
  Real worst = 0.0;
  for (const LinearConstraint& row : lp.constraints()) {
    if (!std::isfinite(row.rhs)) {
      const bool vacuous = (row.sense == Sense::LessEqual && row.rhs > 0) ||
                           (row.sense == Sense::GreaterEqual && row.rhs < 0);
      if (!vacuous) return kInfinity;
      continue;
    }
    const Real scale = std::max(1.0, std::abs(row.rhs));
    const Real r = residual(row, point) / scale;
    switch (row.sense) {
      case Sense::GreaterEqual: worst = std::max(worst, -r); break;
      case Sense::LessEqual: worst = std::max(worst, r); break;
      case Sense::Equal: worst = std::max(worst, std::abs(r)); break;
    }
  }
  const auto& vars = lp.variables();
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const Real x = point(static_cast<Eigen::Index>(j));
    if (std::isfinite(vars[j].lower)) {
      worst = std::max(worst, (vars[j].lower - x) / std::max(1.0, std::abs(vars[j].lower)));
    }
    if (std::isfinite(vars[j].upper)) {
      worst = std::max(worst, (x - vars[j].upper) / std::max(1.0, std::abs(vars[j].upper)));
    }
  }
  return worst;
}

bool is_feasible(const LinearProgram& lp, const Vector& point, Real tolerance) {
  return max_violation(lp, point) <= tolerance;
}

}  // namespace nearopt
