#include "nearopt/conditions.hpp"

#include <algorithm>

namespace nearopt {

Selector::Selector(Vector weights) : weights_(std::move(weights)) {
  bool any = false;
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (weights_(i) != 0.0 && weights_(i) != 1.0) throw ModelError("selector entries must be 0 or 1");
    any = any || weights_(i) == 1.0;
  }
  if (!any) throw ModelError("selector selects no variable");
}

Selector Selector::from_indices(std::size_t num_variables, std::span<const std::size_t> indices) {
  Vector w = Vector::Zero(static_cast<Eigen::Index>(num_variables));
  for (std::size_t i : indices) {
    if (i >= num_variables) throw ModelError("selector index " + std::to_string(i) + " out of range");
    w(static_cast<Eigen::Index>(i)) = 1.0;
  }
  return Selector(std::move(w));
}

std::vector<std::size_t> Selector::indices() const {
  std::vector<std::size_t> out;
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (weights_(i) == 1.0) out.push_back(static_cast<std::size_t>(i));
  }
  return out;
}

Real Selector::apply(const Vector& x) const {
  if (x.size() != weights_.size()) throw ModelError("selector dimension does not match point");
  return weights_.dot(x);
}

LinearObjective Selector::as_objective(std::string label) const { return {weights_, 0.0, std::move(label)}; }

bool holds(const ConditionSpec& condition, const Vector& x, Real tolerance) {
  return condition.selector.apply(x) >= condition.threshold - tolerance;
}

bool implies(const ConditionSpec& consequent, const ConditionSpec& premise) {
  if (!(consequent.selector == premise.selector)) {
    throw ModelError("implication is only decided between conditions sharing one selector");
  }
  return consequent.threshold <= premise.threshold;
}

ConditionSpec non_implied(std::span<const Real> thresholds, const Selector& selector) {
  if (thresholds.empty()) throw ModelError("non_implied: no thresholds given");
  return {selector, *std::max_element(thresholds.begin(), thresholds.end())};
}

std::string to_string(BoundKind kind) {
  return kind == BoundKind::ExactOptimum ? "exact" : "upper_bound";
}

}  // namespace nearopt
