#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nearopt/lp.hpp"

namespace nearopt {

/// Binary selector d over the program variables; d'x is the selected sum.
class Selector {
 public:
  Selector() = default;
  explicit Selector(Vector weights);
  static Selector from_indices(std::size_t num_variables, std::span<const std::size_t> indices);

  const Vector& weights() const { return weights_; }
  Eigen::Index size() const { return weights_.size(); }
  std::vector<std::size_t> indices() const;
  Real apply(const Vector& x) const;

  LinearObjective as_objective(std::string label = "selector") const;

  friend bool operator==(const Selector& a, const Selector& b) { return a.weights_ == b.weights_; }

 private:
  Vector weights_;
};

/// phi(x) := d'x >= c.
struct ConditionSpec {
  Selector selector;
  Real threshold = 0.0;
};

/// d'x >= c - tolerance.
bool holds(const ConditionSpec& condition, const Vector& x, Real tolerance = Tolerances{}.feasibility);

/// psi(consequent | premise): whether `premise` implies `consequent`, i.e. the
/// truth space of the premise lies inside that of the consequent. Decided only
/// within one fixed-selector family, where it reduces to comparing thresholds.
bool implies(const ConditionSpec& consequent, const ConditionSpec& premise);

/// Among thresholds all certified necessary for the same space, the largest is
/// the one condition implied by no other and implying all of them.
ConditionSpec non_implied(std::span<const Real> thresholds, const Selector& selector);

enum class BoundKind { ExactOptimum, UpperBound };

std::string to_string(BoundKind kind);

struct NecessaryConditionReport {
  Selector selector;
  Real threshold = 0.0;              // c* (single objective) or c~ (front)
  std::vector<Real> anchor_minima;   // c_i per anchor
  std::vector<Vector> witnesses;     // argmin per anchor
  std::size_t winning_anchor = 0;
  Vector epsilon;
  std::size_t front_size = 0;
  BoundKind bound = BoundKind::ExactOptimum;
  std::vector<std::string> notes;

  ConditionSpec condition() const { return {selector, threshold}; }
};

}  // namespace nearopt
