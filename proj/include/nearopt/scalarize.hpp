#pragma once

#include <cstddef>

#include "nearopt/lp.hpp"

namespace nearopt {

/// Strictly positive weights, one per objective.
class WeightVector {
 public:
  explicit WeightVector(Vector weights);
  const Vector& values() const { return weights_; }
  Eigen::Index size() const { return weights_.size(); }

 private:
  Vector weights_;
};

enum class CapMode { Absolute, Relative };

/// Which objective stays free and how the others are capped. In relative
/// mode cap_k = (1 + coefficient_k) * reference_k, mirroring a deviation from
/// a previously solved optimum; reference_k must be positive.
struct EpsilonConstraintSpec {
  std::size_t free_objective = 0;
  CapMode mode = CapMode::Relative;
  Vector caps;       // absolute caps, or relative coefficients
  Vector reference;  // relative mode only

  static EpsilonConstraintSpec absolute(std::size_t free_objective, Vector caps);
  static EpsilonConstraintSpec relative(std::size_t free_objective, Vector coefficients, Vector reference);

  Real cap(std::size_t k) const;
};

/// A program plus the index of the objective to minimise. All original
/// objectives are kept so candidate points can be evaluated on each of them.
struct ScalarizedProgram {
  LinearProgram program;
  std::size_t objective = 0;
};

ScalarizedProgram weighted_sum(const LinearProgram& lp, const WeightVector& weights);

/// Adds one cap row per constrained objective (n - 1 rows); an infinite cap
/// yields a vacuous row.
ScalarizedProgram epsilon_constraint(const LinearProgram& lp, const EpsilonConstraintSpec& spec);

}  // namespace nearopt
