#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace nearopt {

using Real = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr Real kInfinity = std::numeric_limits<Real>::infinity();

/// Raised for malformed programs, specs and model files (input errors).
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a result violates an invariant the pipeline guarantees.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class Sense { GreaterEqual, LessEqual, Equal };
enum class Direction { Minimize, Maximize };
enum class SolveStatus { Optimal, Infeasible, Unbounded };

std::string_view to_string(Sense sense);
std::string_view to_string(SolveStatus status);

struct Tolerances {
  Real feasibility = 1e-7;  // scaled by max(1, |rhs|) per row
  Real optimality = 1e-6;   // relative
};

struct Variable {
  std::string name;
  Real lower = 0.0;
  Real upper = kInfinity;
};

struct Term {
  std::size_t index = 0;
  Real coefficient = 0.0;
};

/// Sparse row `sum(terms) <sense> rhs`. An infinite rhs on the slack side
/// (`<= +inf`, `>= -inf`) is vacuous and dropped by the solver.
struct LinearConstraint {
  std::vector<Term> terms;
  Sense sense = Sense::GreaterEqual;
  Real rhs = 0.0;
  std::string name;
};

struct LinearObjective {
  Vector coefficients;
  Real offset = 0.0;
  std::string label;
};

/// Immutable linear program: variables with bounds, sparse rows and one or
/// more objectives. Construction validates every invariant; the mutating
/// operations below return new programs.
class LinearProgram {
 public:
  LinearProgram() = default;
  LinearProgram(std::vector<Variable> variables,
                std::vector<LinearConstraint> constraints,
                std::vector<LinearObjective> objectives);

  std::size_t num_variables() const { return variables_.size(); }
  std::size_t num_constraints() const { return constraints_.size(); }
  std::size_t num_objectives() const { return objectives_.size(); }

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }
  const std::vector<LinearObjective>& objectives() const { return objectives_; }
  const LinearObjective& objective(std::size_t k) const;

  std::optional<std::size_t> variable_index(std::string_view name) const;
  std::optional<std::size_t> objective_index(std::string_view label) const;

 private:
  std::vector<Variable> variables_;
  std::vector<LinearConstraint> constraints_;
  std::vector<LinearObjective> objectives_;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::Infeasible;
  std::optional<Vector> point;
  std::optional<Real> objective_value;
  std::size_t pivots = 0;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

/// Single-entry solver interface; the bundled dense simplex is one backend.
class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual SolveOutcome solve(const LinearProgram& lp, std::size_t objective,
                             Direction direction) const = 0;
  virtual std::string name() const = 0;
  virtual const Tolerances& tolerances() const = 0;
};

/// Two-phase primal simplex on a dense tableau with Bland's rule.
class DenseSimplexBackend final : public SolverBackend {
 public:
  explicit DenseSimplexBackend(Tolerances tolerances = {}) : tolerances_(tolerances) {}

  SolveOutcome solve(const LinearProgram& lp, std::size_t objective,
                     Direction direction) const override;
  std::string name() const override;
  const Tolerances& tolerances() const override { return tolerances_; }

 private:
  Tolerances tolerances_;
};

const SolverBackend& default_backend();

SolveOutcome solve(const LinearProgram& lp, std::size_t objective,
                   Direction direction = Direction::Minimize,
                   const SolverBackend& backend = default_backend());

LinearProgram add_constraint(const LinearProgram& lp, LinearConstraint constraint);
LinearProgram add_constraints(const LinearProgram& lp, std::vector<LinearConstraint> rows);
/// Appends an objective and leaves the feasible set untouched.
LinearProgram add_objective(const LinearProgram& lp, LinearObjective objective);

/// coefficients . point + offset, no tolerance involved.
Real evaluate(const LinearObjective& objective, const Vector& point);
Vector evaluate_all(const LinearProgram& lp, const Vector& point);

/// Row `f(x) <= cap` with the objective offset folded into the rhs.
LinearConstraint objective_cap(const LinearObjective& objective, Real cap,
                               Sense sense = Sense::LessEqual, std::string name = {});

/// Signed residual `lhs - rhs` of one row at `point`.
Real residual(const LinearConstraint& row, const Vector& point);

/// Largest scaled violation over rows and bounds; zero when feasible.
Real max_violation(const LinearProgram& lp, const Vector& point);
bool is_feasible(const LinearProgram& lp, const Vector& point, Real tolerance);

}  // namespace nearopt
