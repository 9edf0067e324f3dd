#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nearopt/lp.hpp"

namespace nearopt {

/// Absolute tie tolerance on objective values when deciding dominance.
inline constexpr Real kDominanceTolerance = 1e-9;

struct Provenance {
  enum class Method { Anchor, EpsilonConstraint, WeightedSum, External };
  Method method = Method::External;
  Real parameter = 0.0;     // epsilon, weight, or 0
  std::size_t objective = 0;  // anchor / free objective index
};

std::string to_string(Provenance::Method method);

struct ParetoPoint {
  Vector decision;
  Vector objectives;
  Provenance provenance;
};

/// Point whose objective tuple is evaluate() of every objective at `decision`.
ParetoPoint make_point(const LinearProgram& lp, Vector decision, Provenance provenance = {});

/// Individual optima plus cross evaluations: cross(k, i) = f_k at the
/// optimum of objective i.
struct AnchorTable {
  std::vector<SolveOutcome> outcomes;
  std::vector<ParetoPoint> anchors;
  Matrix cross;
};

struct ParetoFront {
  std::vector<ParetoPoint> points;   // sorted by first objective, non-dominated
  std::vector<ParetoPoint> anchors;  // one per objective
  std::vector<std::string> warnings;

  std::size_t size() const { return points.size(); }
};

class FrontError : public std::runtime_error {
 public:
  FrontError(std::string message, std::size_t objective, SolveStatus status)
      : std::runtime_error(std::move(message)), objective_(objective), status_(status) {}
  std::size_t objective() const { return objective_; }
  SolveStatus status() const { return status_; }

 private:
  std::size_t objective_;
  SolveStatus status_;
};

/// Minimises each objective in turn. Every optimum is refined lexicographically
/// (the sum of the other objectives is minimised on the optimal face) so the
/// anchors are efficient rather than only weakly efficient.
AnchorTable individual_optima(const LinearProgram& lp, const SolverBackend& backend = default_backend(),
                              std::size_t jobs = 1);

struct FrontOptions {
  std::size_t jobs = 1;
  bool include_anchors = true;
};

/// Relative epsilon-constraint front: minimise `free_objective` with every other
/// objective capped at (1 + eps) times its own optimum, one solve per schedule
/// entry, plus the anchors. Infeasible members are dropped with a warning.
ParetoFront generate_front(const LinearProgram& lp, const std::vector<Real>& schedule,
                           std::size_t free_objective, const SolverBackend& backend = default_backend(),
                           const FrontOptions& options = {});
ParetoFront generate_front(const LinearProgram& lp, const AnchorTable& anchors,
                           const std::vector<Real>& schedule, std::size_t free_objective,
                           const SolverBackend& backend = default_backend(), const FrontOptions& options = {});

/// Upper end of the admissible schedule interval for objective `constrained`:
/// f_k(x_j*) / f_k* - 1 with j the free objective.
Real schedule_limit(const AnchorTable& anchors, std::size_t free_objective, std::size_t constrained);

/// a is <= b everywhere and < b somewhere, up to `tolerance`.
bool dominates(const Vector& a, const Vector& b, Real tolerance = kDominanceTolerance);

/// Maximal non-dominated subset, in input order.
std::vector<ParetoPoint> dominance_filter(const std::vector<ParetoPoint>& points,
                                          Real tolerance = kDominanceTolerance);

struct SpreadReport {
  std::size_t count = 0;
  std::optional<Real> largest_gap;  // empty when fewer than two distinct tuples
  Real coverage = 0.0;              // 2-D rectangle-union proxy; artifact metric
};

/// Gaps are Euclidean distances between consecutive tuples (sorted by the first
/// objective, anchors included) after scaling each objective to [0, 1] over
/// the anchor box. Coverage is the area dominated by the front inside the box
/// spanned by ideal and nadir, divided by the box area.
SpreadReport spread_report(const ParetoFront& front);

}  // namespace nearopt
