#include "nearopt/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "nearopt/parallel.hpp"
#include "nearopt/scalarize.hpp"

namespace nearopt {

std::string to_string(Provenance::Method method) {
  switch (method) {
    case Provenance::Method::Anchor: return "anchor";
    case Provenance::Method::EpsilonConstraint: return "epsilon_constraint";
    case Provenance::Method::WeightedSum: return "weighted_sum";
    case Provenance::Method::External: return "external";
  }
  return "?";
}

ParetoPoint make_point(const LinearProgram& lp, Vector decision, Provenance provenance) {
  ParetoPoint p;
  p.objectives = evaluate_all(lp, decision);
  p.decision = std::move(decision);
  p.provenance = provenance;
  return p;
}

AnchorTable individual_optima(const LinearProgram& lp, const SolverBackend& backend, std::size_t jobs) {
  const std::size_t n = lp.num_objectives();
  AnchorTable table;
  table.outcomes.resize(n);

  parallel_for(n, jobs, [&](std::size_t k) {
    SolveOutcome primary = solve(lp, k, Direction::Minimize, backend);
    if (!primary.optimal()) {
      throw FrontError("objective '" + lp.objective(k).label + "' is " + std::string(to_string(primary.status)) +
                           "; cannot build a front",
                       k, primary.status);
    }
    if (n > 1) {
      const Real best = *primary.objective_value;
      LinearObjective others{Vector::Zero(static_cast<Eigen::Index>(lp.num_variables())), 0.0, "lexicographic"};
      for (std::size_t i = 0; i < n; ++i) {
        if (i == k) continue;
        others.coefficients += lp.objective(i).coefficients;
        others.offset += lp.objective(i).offset;
      }
      auto refine = [&](Real cap) {
        const LinearProgram face = add_objective(
            add_constraint(lp, objective_cap(lp.objective(k), cap, Sense::LessEqual, "optimal-face")), others);
        return solve(face, n, Direction::Minimize, backend);
      };
      SolveOutcome refined = refine(best);
      // rounding can cut the face off entirely
      if (!refined.optimal()) refined = refine(best + 1e-9 * std::max(1.0, std::abs(best)));
      if (refined.optimal()) {
        primary.pivots += refined.pivots;
        primary.point = std::move(refined.point);
        primary.objective_value = evaluate(lp.objective(k), *primary.point);
      }
    }
    table.outcomes[k] = std::move(primary);
  });

  table.cross = Matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    table.anchors.push_back(make_point(lp, *table.outcomes[i].point, {Provenance::Method::Anchor, 0.0, i}));
    table.cross.col(static_cast<Eigen::Index>(i)) = table.anchors.back().objectives;
  }
  return table;
}

Real schedule_limit(const AnchorTable& anchors, std::size_t free_objective, std::size_t constrained) {
  const auto j = static_cast<Eigen::Index>(free_objective);
  const auto k = static_cast<Eigen::Index>(constrained);
  return anchors.cross(k, j) / anchors.cross(k, k) - 1.0;
}

ParetoFront generate_front(const LinearProgram& lp, const std::vector<Real>& schedule, std::size_t free_objective,
                           const SolverBackend& backend, const FrontOptions& options) {
  return generate_front(lp, individual_optima(lp, backend, options.jobs), schedule, free_objective, backend,
                        options);
}

ParetoFront generate_front(const LinearProgram& lp, const AnchorTable& anchors, const std::vector<Real>& schedule,
                           std::size_t free_objective, const SolverBackend& backend, const FrontOptions& options) {
  const std::size_t n = lp.num_objectives();
  if (n < 2) throw ModelError("a front needs at least two objectives");
  if (free_objective >= n) throw ModelError("free objective index out of range");

  Vector reference = anchors.cross.diagonal();
  for (Real eps : schedule) {
    if (!(eps > 0.0)) throw ModelError("schedule values must be strictly positive");
    for (std::size_t k = 0; k < n; ++k) {
      if (k == free_objective) continue;
      const Real limit = schedule_limit(anchors, free_objective, k);
      if (!(eps < limit)) {
        std::ostringstream msg;
        msg << "schedule value " << eps << " is outside ]0, " << limit << "[ for objective '"
            << lp.objective(k).label << "'";
        throw ModelError(msg.str());
      }
    }
  }

  std::vector<std::optional<ParetoPoint>> members(schedule.size());
  std::vector<std::string> member_warnings(schedule.size());
  parallel_for(schedule.size(), options.jobs, [&](std::size_t s) {
    const Vector coefficients = Vector::Constant(static_cast<Eigen::Index>(n), schedule[s]);
    const auto scalarized =
        epsilon_constraint(lp, EpsilonConstraintSpec::relative(free_objective, coefficients, reference));
    SolveOutcome out = solve(scalarized.program, scalarized.objective, Direction::Minimize, backend);
    if (!out.optimal()) {
      std::ostringstream msg;
      msg << "epsilon " << schedule[s] << ": member solve " << to_string(out.status) << ", dropped";
      member_warnings[s] = msg.str();
      return;
    }
    members[s] = make_point(lp, std::move(*out.point),
                            {Provenance::Method::EpsilonConstraint, schedule[s], free_objective});
  });

  ParetoFront front;
  front.anchors = anchors.anchors;
  std::vector<ParetoPoint> candidates;
  if (options.include_anchors) candidates = anchors.anchors;
  for (std::size_t s = 0; s < schedule.size(); ++s) {
    if (members[s]) candidates.push_back(std::move(*members[s]));
    if (!member_warnings[s].empty()) front.warnings.push_back(member_warnings[s]);
  }

  // Identical tuples (e.g. a cap that does not bind) collapse onto the first.
  std::vector<ParetoPoint> unique;
  for (auto& c : candidates) {
    const bool duplicate = std::any_of(unique.begin(), unique.end(), [&](const ParetoPoint& u) {
      return ((u.objectives - c.objectives).cwiseAbs().array() <= kDominanceTolerance).all();
    });
    if (!duplicate) unique.push_back(std::move(c));
  }

  front.points = dominance_filter(unique);
  std::stable_sort(front.points.begin(), front.points.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
    for (Eigen::Index k = 0; k < a.objectives.size(); ++k) {
      if (a.objectives(k) != b.objectives(k)) return a.objectives(k) < b.objectives(k);
    }
    return false;
  });
  return front;
}

bool dominates(const Vector& a, const Vector& b, Real tolerance) {
  bool strictly = false;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (a(k) > b(k) + tolerance) return false;
    if (a(k) < b(k) - tolerance) strictly = true;
  }
  return strictly;
}

std::vector<ParetoPoint> dominance_filter(const std::vector<ParetoPoint>& points, Real tolerance) {
  if (points.empty()) return {};
  const Eigen::Index arity = points.front().objectives.size();
  for (const auto& p : points) {
    if (p.objectives.size() != arity) throw ModelError("dominance_filter: objective arity differs between points");
  }

  // Lexicographic order puts every dominator ahead of what it dominates, so
  // each point only needs checking against the survivors seen so far.
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Vector& x = points[a].objectives;
    const Vector& y = points[b].objectives;
    for (Eigen::Index k = 0; k < arity; ++k) {
      if (x(k) != y(k)) return x(k) < y(k);
    }
    return false;
  });

  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    const bool dominated = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return dominates(points[k].objectives, points[idx].objectives, tolerance);
    });
    if (!dominated) kept.push_back(idx);
  }
  // A later survivor can still dominate an earlier one through the tie band.
  std::vector<bool> keep(points.size(), false);
  for (std::size_t idx : kept) {
    keep[idx] = std::none_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return k != idx && dominates(points[k].objectives, points[idx].objectives, tolerance);
    });
  }

  std::vector<ParetoPoint> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (keep[i]) out.push_back(points[i]);
  }
  return out;
}

SpreadReport spread_report(const ParetoFront& front) {
  if (front.points.empty()) throw ModelError("spread_report: empty front");
  SpreadReport report;
  report.count = front.points.size();

  std::vector<Vector> tuples;
  auto push_unique = [&](const Vector& t) {
    const bool seen = std::any_of(tuples.begin(), tuples.end(), [&](const Vector& u) {
      return ((u - t).cwiseAbs().array() <= kDominanceTolerance).all();
    });
    if (!seen) tuples.push_back(t);
  };
  for (const auto& a : front.anchors) push_unique(a.objectives);
  for (const auto& p : front.points) push_unique(p.objectives);
  std::sort(tuples.begin(), tuples.end(), [](const Vector& a, const Vector& b) {
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      if (a(k) != b(k)) return a(k) < b(k);
    }
    return false;
  });

  const Eigen::Index arity = tuples.front().size();
  Vector ideal = tuples.front();
  Vector nadir = tuples.front();
  for (const auto& t : tuples) {
    ideal = ideal.cwiseMin(t);
    nadir = nadir.cwiseMax(t);
  }
  const Vector range = (nadir - ideal).cwiseMax(Vector::Constant(arity, 0.0));
  auto normalize = [&](const Vector& t) {
    Vector out(arity);
    for (Eigen::Index k = 0; k < arity; ++k) out(k) = range(k) > 0.0 ? (t(k) - ideal(k)) / range(k) : 0.0;
    return out;
  };

  if (tuples.size() >= 2) {
    Real gap = 0.0;
    for (std::size_t i = 1; i < tuples.size(); ++i) {
      gap = std::max(gap, (normalize(tuples[i]) - normalize(tuples[i - 1])).norm());
    }
    report.largest_gap = gap;
  }

  if (arity == 2 && range(0) > 0.0 && range(1) > 0.0) {
    // Staircase union of [p1, 1] x [p2, 1] in normalised coordinates.
    std::vector<Vector> staircase;
    for (const auto& t : tuples) staircase.push_back(normalize(t));
    Real area = 0.0;
    Real lowest = 1.0;
    for (std::size_t i = 0; i < staircase.size(); ++i) {
      const Real next_x = i + 1 < staircase.size() ? staircase[i + 1](0) : 1.0;
      lowest = std::min(lowest, staircase[i](1));
      area += (next_x - staircase[i](0)) * (1.0 - lowest);
    }
    report.coverage = area;
  }
  return report;
}

}  // namespace nearopt
