#include "nearopt/analytic_oracle.hpp"

#include <algorithm>
#include <sstream>

namespace nearopt::oracle {

Interval GridResult::hull() const {
  if (intervals.empty()) throw ModelError("grid result has no feasible interval");
  return {intervals.front().lower, intervals.back().upper};
}

namespace {

std::vector<Real> grid_nodes(const ScalarFunctionPair& pair, Real step) {
  if (!(step > 0.0)) throw ModelError("grid step must be positive");
  if (pair.lower > 0.0 || pair.upper < 1.2) throw ModelError("grid domain must cover [0, 1.2]");
  const auto count = static_cast<std::size_t>(std::llround((pair.upper - pair.lower) / step));
  std::vector<Real> nodes(count + 1);
  for (std::size_t i = 0; i <= count; ++i) nodes[i] = pair.lower + static_cast<Real>(i) * step;
  return nodes;
}

Real grid_argmin(const std::vector<Real>& nodes, int which) {
  Real best = nodes.front();
  for (Real x : nodes) {
    if (ScalarFunctionPair::value(which, x) < ScalarFunctionPair::value(which, best)) best = x;
  }
  return best;
}

}  // namespace

GridResult grid_epsilon_space(const ScalarFunctionPair& pair, Which which, const std::vector<Real>& epsilon,
                              const std::vector<Real>& anchors, Real step) {
  const std::vector<Real> nodes = grid_nodes(pair, step);
  GridResult result;
  result.step = step;

  std::vector<int> functions;
  if (which == Which::F1) functions = {0};
  if (which == Which::F2) functions = {1};
  if (which == Which::Both) functions = {0, 1};
  if (epsilon.size() != functions.size()) throw ModelError("grid_epsilon_space: one epsilon per function");
  for (Real e : epsilon) {
    if (!(e >= 0.0)) throw ModelError("grid_epsilon_space: epsilon must be nonnegative");
  }
  if (which == Which::Both && anchors.empty()) throw ModelError("grid_epsilon_space: empty anchor set");

  for (int f : functions) result.minimizers.push_back(grid_argmin(nodes, f));
  const std::vector<Real> centres = anchors.empty() ? result.minimizers : anchors;

  // caps[a][k] = (1 + eps_k) f_k(anchor a)
  std::vector<std::vector<Real>> caps;
  for (Real a : centres) {
    std::vector<Real> row;
    for (std::size_t k = 0; k < functions.size(); ++k) {
      row.push_back((1.0 + epsilon[k]) * ScalarFunctionPair::value(functions[k], a));
    }
    caps.push_back(std::move(row));
  }

  bool open = false;
  Real start = 0.0, last = 0.0;
  for (Real x : nodes) {
    std::vector<Real> values;
    for (int f : functions) values.push_back(ScalarFunctionPair::value(f, x));
    const bool inside = std::any_of(caps.begin(), caps.end(), [&](const std::vector<Real>& cap) {
      for (std::size_t k = 0; k < values.size(); ++k) {
        if (values[k] > cap[k]) return false;
      }
      return true;
    });
    if (inside && !open) {
      open = true;
      start = x;
    }
    if (!inside && open) {
      result.intervals.push_back({start, last});
      open = false;
    }
    last = x;
  }
  if (open) result.intervals.push_back({start, last});
  return result;
}

std::vector<Real> linspace(Real a, Real b, std::size_t m) {
  if (m < 2) throw ModelError("linspace needs at least two points");
  std::vector<Real> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = a + (b - a) * static_cast<Real>(i) / static_cast<Real>(m - 1);
  return out;
}

std::vector<Eigen::Vector2d> grid_pareto(const ScalarFunctionPair&, std::size_t m, ParetoSpacing spacing,
                                         const std::vector<Real>& xs) {
  if (m < 2) throw ModelError("grid_pareto needs m >= 2");
  std::vector<Real> points;
  switch (spacing) {
    case ParetoSpacing::ByX:
      points = linspace(ScalarFunctionPair::argmin_f1, ScalarFunctionPair::argmin_f2, m);
      break;
    case ParetoSpacing::ByF1: {
      const Real lo = ScalarFunctionPair::f1(ScalarFunctionPair::argmin_f1);
      const Real hi = ScalarFunctionPair::f1(ScalarFunctionPair::argmin_f2);
      // Inverse of f1 on the increasing branch x >= 0.375.
      for (Real v : linspace(lo, hi, m)) points.push_back((0.75 + std::sqrt((v - 2.0) / 10.0)) / 2.0);
      break;
    }
    case ParetoSpacing::PrescribedX:
      if (xs.size() != m) throw ModelError("grid_pareto: prescribed x count differs from m");
      points = xs;
      break;
  }
  std::vector<Eigen::Vector2d> tuples;
  for (Real x : points) {
    if (x < ScalarFunctionPair::argmin_f1 - 1e-12 || x > ScalarFunctionPair::argmin_f2 + 1e-12) {
      throw ModelError("grid_pareto: x outside the efficient interval");
    }
    tuples.emplace_back(ScalarFunctionPair::f1(x), ScalarFunctionPair::f2(x));
  }
  return tuples;
}

Real round_significant(Real value, int digits) {
  if (value == 0.0 || !std::isfinite(value)) return value;
  const int exponent = static_cast<int>(std::floor(std::log10(std::abs(value))));
  const Real scale = std::pow(10.0, digits - 1 - exponent);
  return std::round(value * scale) / scale;
}

LinearProgram quadratic_grid_program(const ScalarFunctionPair& pair, Real step) {
  const std::vector<Real> nodes = grid_nodes(pair, step);
  const auto count = static_cast<Eigen::Index>(nodes.size());
  std::vector<Variable> variables;
  variables.push_back({"x", pair.lower, pair.upper});
  for (Eigen::Index i = 0; i < count; ++i) variables.push_back({"w[" + std::to_string(i) + "]", 0.0, kInfinity});

  LinearConstraint convexity{{}, Sense::Equal, 1.0, "convexity"};
  LinearConstraint position{{{0, 1.0}}, Sense::Equal, 0.0, "position"};
  LinearObjective f1{Vector::Zero(count + 1), 0.0, "f1"};
  LinearObjective f2{Vector::Zero(count + 1), 0.0, "f2"};
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto column = static_cast<std::size_t>(i + 1);
    const Real x = nodes[static_cast<std::size_t>(i)];
    convexity.terms.push_back({column, 1.0});
    if (x != 0.0) position.terms.push_back({column, -x});
    f1.coefficients(i + 1) = ScalarFunctionPair::f1(x);
    f2.coefficients(i + 1) = ScalarFunctionPair::f2(x);
  }
  return LinearProgram(std::move(variables), {std::move(convexity), std::move(position)},
                       {std::move(f1), std::move(f2)});
}

Vector quadratic_grid_point(const LinearProgram& program, Real x) {
  const auto n = static_cast<Eigen::Index>(program.num_variables());
  const Real lower = program.variables()[0].lower;
  const Real upper = program.variables()[0].upper;
  const Real step = (upper - lower) / static_cast<Real>(n - 2);
  const auto node = static_cast<Eigen::Index>(std::llround((x - lower) / step));
  if (node < 0 || node > n - 2) throw ModelError("quadratic_grid_point: x outside the grid");
  Vector point = Vector::Zero(n);
  point(0) = lower + static_cast<Real>(node) * step;
  point(node + 1) = 1.0;
  return point;
}

LinearProgram random_tiny_program(std::mt19937_64& rng, const TinyProgramOptions& options) {
  std::uniform_int_distribution<std::size_t> var_count(1, options.max_variables);
  std::uniform_int_distribution<std::size_t> row_count(0, options.max_rows);
  std::uniform_int_distribution<int> coefficient(-5, 5);
  std::uniform_int_distribution<int> rhs(-10, 20);
  std::uniform_int_distribution<int> coin(0, 3);
  std::uniform_int_distribution<int> sense(0, 2);

  const std::size_t n = var_count(rng);
  const std::size_t m = row_count(rng);
  std::vector<Variable> variables;
  for (std::size_t j = 0; j < n; ++j) {
    const bool signed_box = coin(rng) == 0;
    variables.push_back({"x" + std::to_string(j), signed_box ? -options.box : 0.0, options.box});
  }
  std::vector<LinearConstraint> rows;
  for (std::size_t r = 0; r < m; ++r) {
    LinearConstraint row;
    for (std::size_t j = 0; j < n; ++j) {
      const int a = coin(rng) == 0 ? 0 : coefficient(rng);
      if (a != 0) row.terms.push_back({j, static_cast<Real>(a)});
    }
    if (row.terms.empty()) row.terms.push_back({0, 1.0});
    const int s = sense(rng);
    row.sense = s == 0 ? Sense::GreaterEqual : (s == 1 ? Sense::LessEqual : Sense::Equal);
    row.rhs = static_cast<Real>(rhs(rng));
    rows.push_back(std::move(row));
  }
  LinearObjective objective{Vector::Zero(static_cast<Eigen::Index>(n)), static_cast<Real>(coefficient(rng)), "f"};
  for (std::size_t j = 0; j < n; ++j) objective.coefficients(static_cast<Eigen::Index>(j)) = coefficient(rng);
  return LinearProgram(std::move(variables), std::move(rows), {std::move(objective)});
}

CorpusResult tiny_program_corpus(std::uint64_t seed, std::size_t count, const SolverBackend& backend,
                                 Real tolerance) {
  std::mt19937_64 rng(seed);
  CorpusResult result;
  for (std::size_t i = 0; i < count; ++i) {
    const LinearProgram lp = random_tiny_program(rng);
    const SolveOutcome fast = backend.solve(lp, 0, Direction::Minimize);
    const SolveOutcome exact = vertex_enumerate(lp, 0);
    ++result.programs;
    if (exact.status == SolveStatus::Infeasible) ++result.infeasible;

    bool agree = fast.status == exact.status;
    if (agree && exact.optimal()) {
      const Real gap = std::abs(*fast.objective_value - *exact.objective_value) /
                       std::max(1.0, std::abs(*exact.objective_value));
      result.worst_gap = std::max(result.worst_gap, gap);
      agree = gap <= tolerance;
    }
    if (agree) {
      ++result.agreements;
    } else {
      std::ostringstream msg;
      msg << "program " << i << ": simplex " << to_string(fast.status);
      if (fast.objective_value) msg << " " << *fast.objective_value;
      msg << " vs enumeration " << to_string(exact.status);
      if (exact.objective_value) msg << " " << *exact.objective_value;
      result.disagreements.push_back(msg.str());
    }
  }
  return result;
}

}  // namespace nearopt::oracle
