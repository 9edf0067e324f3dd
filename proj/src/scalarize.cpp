#include "nearopt/scalarize.hpp"

#include <cmath>
#include <string>

namespace nearopt {

WeightVector::WeightVector(Vector weights) : weights_(std::move(weights)) {
  if (weights_.size() == 0) throw ModelError("weight vector is empty");
  for (Eigen::Index k = 0; k < weights_.size(); ++k) {
    if (!(weights_(k) > 0.0) || !std::isfinite(weights_(k))) {
      throw ModelError("weight " + std::to_string(k) + " must be strictly positive and finite");
    }
  }
}

EpsilonConstraintSpec EpsilonConstraintSpec::absolute(std::size_t free_objective, Vector caps) {
  return {free_objective, CapMode::Absolute, std::move(caps), {}};
}

EpsilonConstraintSpec EpsilonConstraintSpec::relative(std::size_t free_objective, Vector coefficients,
                                                      Vector reference) {
  return {free_objective, CapMode::Relative, std::move(coefficients), std::move(reference)};
}

Real EpsilonConstraintSpec::cap(std::size_t k) const {
  const auto i = static_cast<Eigen::Index>(k);
  if (mode == CapMode::Absolute) return caps(i);
  return (1.0 + caps(i)) * reference(i);
}

ScalarizedProgram weighted_sum(const LinearProgram& lp, const WeightVector& weights) {
  if (static_cast<std::size_t>(weights.size()) != lp.num_objectives()) {
    throw ModelError("weight vector has " + std::to_string(weights.size()) + " entries for " +
                     std::to_string(lp.num_objectives()) + " objectives");
  }
  LinearObjective combined{Vector::Zero(static_cast<Eigen::Index>(lp.num_variables())), 0.0, "weighted_sum"};
  for (std::size_t k = 0; k < lp.num_objectives(); ++k) {
    const Real w = weights.values()(static_cast<Eigen::Index>(k));
    combined.coefficients += w * lp.objective(k).coefficients;
    combined.offset += w * lp.objective(k).offset;
  }
  const std::size_t index = lp.num_objectives();
  return {add_objective(lp, std::move(combined)), index};
}

ScalarizedProgram epsilon_constraint(const LinearProgram& lp, const EpsilonConstraintSpec& spec) {
  const std::size_t n = lp.num_objectives();
  if (spec.free_objective >= n) throw ModelError("free objective index out of range");
  if (static_cast<std::size_t>(spec.caps.size()) != n) {
    throw ModelError("epsilon-constraint spec needs one cap entry per objective");
  }
  if (spec.mode == CapMode::Relative && static_cast<std::size_t>(spec.reference.size()) != n) {
    throw ModelError("relative epsilon-constraint needs one reference optimum per objective");
  }

  std::vector<LinearConstraint> rows;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == spec.free_objective) continue;
    const auto i = static_cast<Eigen::Index>(k);
    if (std::isnan(spec.caps(i))) {
      throw ModelError("missing cap for objective '" + lp.objective(k).label + "'");
    }
    if (spec.mode == CapMode::Relative) {
      if (!(spec.reference(i) > 0.0)) {
        throw ModelError("relative cap on objective '" + lp.objective(k).label +
                         "' needs a positive reference optimum (degenerate zero optimum)");
      }
      if (spec.caps(i) < 0.0) throw ModelError("relative cap coefficient must be nonnegative");
    }
    rows.push_back(objective_cap(lp.objective(k), spec.cap(k), Sense::LessEqual, "epsilon:" + lp.objective(k).label));
  }
  return {add_constraints(lp, std::move(rows)), spec.free_objective};
}

}  // namespace nearopt
