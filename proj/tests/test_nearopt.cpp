#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "nearopt/analytic_oracle.hpp"
#include "nearopt/esom.hpp"
#include "nearopt/io.hpp"
#include "nearopt/nearopt.hpp"
#include "support.hpp"

using namespace nearopt;
using testing_support::brute_force_min;
using testing_support::dense_rows;

namespace {

Vector vec(std::initializer_list<Real> v) {
  return Eigen::Map<const Vector>(v.begin(), static_cast<Eigen::Index>(v.size()));
}

double f1(double x) { return 10.0 * (2.0 * x - 0.75) * (2.0 * x - 0.75) + 2.0; }

const LinearProgram& grid_model() {
  static const LinearProgram lp = oracle::quadratic_grid_program(oracle::ScalarFunctionPair{});
  return lp;
}

struct Fixture {
  esom::EnergyModelSpec spec;
  esom::CompiledModel model;
  ParetoFront front;
  ParetoFront anchors_only;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture x;
    x.spec = std::get<esom::EnergyModelSpec>(io::load_model(testing_support::fixture_path()));
    x.model = esom::compile(x.spec);
    x.front = generate_front(x.model.program, default_front_schedule(), 1);
    x.anchors_only = generate_front(x.model.program, {}, 1);
    return x;
  }();
  return f;
}

// Range of x = variable 0 over a grid-model program, by min and max solves.
std::pair<Real, Real> x_range(const LinearProgram& lp) {
  const LinearProgram with_x = add_objective(lp, {Vector::Unit(static_cast<Eigen::Index>(lp.num_variables()), 0), 0.0, "x"});
  const std::size_t k = with_x.num_objectives() - 1;
  const SolveOutcome lo = solve(with_x, k);
  const SolveOutcome hi = solve(with_x, k, Direction::Maximize);
  REQUIRE(lo.optimal());
  REQUIRE(hi.optimal());
  return {*lo.objective_value, *hi.objective_value};
}

}  // namespace

TEST_CASE("exact threshold on the two-variable instance") {
  const LinearProgram lp = testing_support::min_sum_program();
  auto rows = dense_rows(testing_support::min_sum_program(10.0));
  rows.push_back({{1.0, 1.0}, 'l', 1.1});  // (1 + 0.1) * optimum 1

  const NecessaryConditionReport x2 = necessary_condition_single(lp, 0, 0.1, Selector(vec({0, 1})));
  CHECK(x2.bound == BoundKind::ExactOptimum);
  CHECK(x2.threshold == doctest::Approx(brute_force_min({0, 1}, rows).value).epsilon(1e-9));
  CHECK(std::abs(x2.threshold - 0.9) <= 1e-6);

  const NecessaryConditionReport x1 = necessary_condition_single(lp, 0, 0.1, Selector(vec({1, 0})));
  CHECK(x1.threshold == doctest::Approx(brute_force_min({1, 0}, rows).value).epsilon(1e-9));
  CHECK(std::abs(x1.threshold) <= 1e-6);

  SUBCASE("epsilon zero with a unique optimum returns 1'x*") {
    const NecessaryConditionReport all = necessary_condition_single(lp, 0, 0.0, Selector(vec({1, 1})));
    const SolveOutcome opt = solve(lp, 0);
    CHECK(all.threshold == doctest::Approx(opt.point->sum()));
  }
}

TEST_CASE("single-objective epsilon space on the grid model") {
  const SolveOutcome base = solve(grid_model(), 0);
  const EpsilonSpace space = epsilon_space_single(grid_model(), 0, 0.25, base);
  CHECK_FALSE(space.degenerate);
  CHECK(space.cap == doctest::Approx(2.5));
  // The LP relaxation mixes grid nodes, so x ranges over the convex hull of
  // nodes whose mixtures stay under the cap: here exactly the sub-level set.
  const auto [lo, hi] = x_range(space.program);
  CHECK(std::abs(lo - 0.263) <= 1e-3);
  CHECK(std::abs(hi - 0.487) <= 1e-3);

  SUBCASE("epsilon zero caps at the optimum") {
    const EpsilonSpace zero = epsilon_space_single(grid_model(), 0, 0.0, base);
    CHECK(zero.cap == doctest::Approx(*base.objective_value));
    const auto [a, b] = x_range(zero.program);
    CHECK(a == doctest::Approx(0.375));
    CHECK(b == doctest::Approx(0.375));
  }
  CHECK_THROWS_AS(epsilon_space_single(grid_model(), 0, -0.1, base), ModelError);
  CHECK_THROWS_AS(epsilon_space_single(grid_model(), 0, 0.1, SolveOutcome{}), ModelError);
}

TEST_CASE("zero optimum is flagged as degenerate") {
  const LinearProgram lp({{"x", 0.0, 1.0}}, {}, {{vec({1.0}), 0.0, "x"}});
  const SolveOutcome base = solve(lp, 0);
  const EpsilonSpace space = epsilon_space_single(lp, 0, 0.5, base);
  CHECK(space.degenerate);
  const NecessaryConditionReport r = necessary_condition_single(lp, 0, 0.5, Selector(vec({1})));
  CHECK_FALSE(r.notes.empty());
}

TEST_CASE("epsilon space of the energy fixture caps cost at 1.05 C*") {
  const LinearProgram& lp = fixture().model.program;
  const SolveOutcome base = solve(lp, 0);
  const EpsilonSpace space = epsilon_space_single(lp, 0, 0.05, base);
  CHECK(space.cap == doctest::Approx(1.05 * *base.objective_value).epsilon(1e-12));
  const LinearConstraint& row = space.program.constraints().back();
  CHECK(row.rhs == doctest::Approx(1.05 * *base.objective_value - lp.objective(0).offset));
}

TEST_CASE("anchor box around x = 0.6") {
  const ParetoPoint anchor = make_point(grid_model(), oracle::quadratic_grid_point(grid_model(), 0.6));
  const EpsilonBox box = epsilon_box(grid_model(), anchor, EpsilonVector{0.25, 0.6});
  CHECK(box.program.num_constraints() == grid_model().num_constraints() + 2);
  CHECK(is_feasible(box.program, anchor.decision, 1e-9));
  const auto [lo, hi] = x_range(box.program);
  CHECK(std::abs(lo - 0.395) <= 1e-3);
  CHECK(std::abs(hi - 0.65) <= 1e-3);

  SUBCASE("anchor slack equals eps_k f_k(anchor)") {
    for (std::size_t k = 0; k < 2; ++k) {
      const LinearConstraint& row = box.program.constraints()[grid_model().num_constraints() + k];
      const Real slack = -residual(row, anchor.decision);
      CHECK(slack == doctest::Approx((k == 0 ? 0.25 : 0.6) * anchor.objectives(static_cast<Eigen::Index>(k))));
    }
  }
  SUBCASE("zero epsilon keeps objective-equivalent points only") {
    const EpsilonBox tight = epsilon_box(grid_model(), anchor, EpsilonVector{0.0, 0.0});
    const auto [a, b] = x_range(tight.program);
    CHECK(a == doctest::Approx(0.6));
    CHECK(b == doctest::Approx(0.6));
  }
  CHECK_THROWS_AS(epsilon_box(grid_model(), anchor, EpsilonVector{0.1}), ModelError);
}

TEST_CASE("union of the two optimum boxes") {
  const AnchorTable t = individual_optima(grid_model());
  Real lo = kInfinity, hi = -kInfinity;
  for (const auto& a : t.anchors) {
    const auto [l, h] = x_range(epsilon_box(grid_model(), a, EpsilonVector{0.25, 0.6}).program);
    lo = std::min(lo, l);
    hi = std::max(hi, h);
  }
  // Same union on the exact grid reference.
  const auto grid = oracle::grid_epsilon_space({}, oracle::Which::Both, {0.25, 0.6}, {0.375, 0.75}).hull();
  CHECK(std::abs(lo - grid.lower) <= 1e-3);
  CHECK(std::abs(hi - grid.upper) <= 1e-3);
  CHECK(std::abs(lo - 0.263) <= 1e-3);
}

TEST_CASE("zero anchor value becomes an equality row") {
  const LinearProgram lp({{"x", 0.0, 1.0}, {"y", 0.0, 1.0}}, {{{{0, 1.0}, {1, 1.0}}, Sense::GreaterEqual, 1.0, ""}},
                         {{vec({1.0, 0.0}), 0.0, "x"}, {vec({0.0, 1.0}), 0.0, "y"}});
  const ParetoPoint anchor = make_point(lp, vec({0.0, 1.0}));
  const EpsilonBox box = epsilon_box(lp, anchor, EpsilonVector{0.5, 0.5});
  CHECK(box.degenerate[0]);
  CHECK_FALSE(box.degenerate[1]);
  CHECK(box.program.constraints()[1].sense == Sense::Equal);
}

TEST_CASE("front upper bound basics") {
  const LinearProgram lp = add_objective(testing_support::min_sum_program(10.0), {vec({0.0, 1.0}), 1.0, "x2p1"});
  const AnchorTable t = individual_optima(lp);
  const Selector d(vec({0, 1}));

  SUBCASE("one anchor equals the single box minimum") {
    const std::vector<ParetoPoint> one = {t.anchors[0]};
    const NecessaryConditionReport r = necessary_condition_multi(lp, one, EpsilonVector{0.1, 0.1}, d);
    const LinearProgram box = add_objective(epsilon_box(lp, t.anchors[0], EpsilonVector{0.1, 0.1}).program,
                                            d.as_objective());
    CHECK(r.threshold == doctest::Approx(*solve(box, box.num_objectives() - 1).objective_value));
    CHECK(r.bound == BoundKind::UpperBound);
  }
  SUBCASE("order independence and witness validity") {
    std::vector<ParetoPoint> pts = generate_front(lp, {0.05, 0.2}, 1).points;
    const NecessaryConditionReport a = necessary_condition_multi(lp, pts, EpsilonVector{0.1, 0.1}, d);
    std::reverse(pts.begin(), pts.end());
    const NecessaryConditionReport b = necessary_condition_multi(lp, pts, EpsilonVector{0.1, 0.1}, d);
    CHECK(a.threshold == b.threshold);
    auto sa = a.anchor_minima, sb = b.anchor_minima;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    CHECK(sa == sb);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const EpsilonBox box = epsilon_box(lp, pts[i], EpsilonVector{0.1, 0.1});
      CHECK(is_feasible(box.program, b.witnesses[i], 1e-7));
      CHECK(d.apply(b.witnesses[i]) == doctest::Approx(b.anchor_minima[i]));
    }
    CHECK(d.apply(b.witnesses[b.winning_anchor]) == doctest::Approx(b.threshold));
  }
  SUBCASE("ties report the lowest-index anchor") {
    const std::vector<ParetoPoint> same = {t.anchors[0], t.anchors[0]};
    CHECK(necessary_condition_multi(lp, same, EpsilonVector{0.1, 0.1}, d).winning_anchor == 0);
  }
  SUBCASE("degenerate selector over an unconstrained variable") {
    const LinearProgram wide({{"x1", 0.0, 10.0}, {"x2", 0.0, 10.0}, {"z", 1.5, 4.0}},
                             {{{{0, 1.0}, {1, 2.0}}, Sense::GreaterEqual, 2.0, ""}},
                             {{vec({1.0, 1.0, 0.0}), 0.0, "sum"}, {vec({1.0, 0.0, 0.0}), 1.0, "x1p1"}});
    const auto front = generate_front(wide, {}, 1).points;
    const NecessaryConditionReport r = necessary_condition_multi(wide, front, EpsilonVector{0.1, 0.1},
                                                                 Selector(vec({0, 0, 1})));
    CHECK(r.threshold == doctest::Approx(1.5));
  }
  CHECK_THROWS_AS(necessary_condition_multi(lp, std::vector<ParetoPoint>{}, EpsilonVector{0.1, 0.1}, d), ModelError);
}

TEST_CASE("energy fixture: endogenous threshold drops below both optima at 1 percent") {
  const Fixture& f = fixture();
  const Selector& d = f.model.selectors.at("endogenous");
  const NecessaryConditionReport r =
      necessary_condition_multi(f.model.program, f.front.points, EpsilonVector{0.01, 0.01}, d);
  REQUIRE(f.front.size() == 8);
  const AnchorTable t = individual_optima(f.model.program);
  CHECK(r.threshold < d.apply(t.anchors[0].decision));
  CHECK(r.threshold < d.apply(t.anchors[1].decision));
  CHECK(r.front_size == 8);
}

TEST_CASE("energy fixture: exogenous floor at 50 percent") {
  const Fixture& f = fixture();
  const NecessaryConditionReport r = necessary_condition_multi(f.model.program, f.front.points,
                                                               EpsilonVector{0.5, 0.5}, f.model.selectors.at("exogenous"));
  CHECK(r.threshold > 1.0);
}

TEST_CASE("sweep") {
  const Fixture& f = fixture();
  const Selector& d = f.model.selectors.at("endogenous");
  const std::vector<Real> levels = {0.01, 0.02};
  const SweepResult s = sweep(f.model.program, f.front.points, levels, levels, d);
  REQUIRE(s.thresholds.size() == 4);
  CHECK(s.monotone);
  CHECK(s.thresholds[1] <= s.thresholds[0] + 1e-6 * std::abs(s.thresholds[0]));
  CHECK(s.thresholds[2] <= s.thresholds[0] + 1e-6 * std::abs(s.thresholds[0]));
  CHECK(s.thresholds[3] <= s.thresholds[1] + 1e-6 * std::abs(s.thresholds[1]));
  CHECK(s.thresholds[3] <= s.thresholds[2] + 1e-6 * std::abs(s.thresholds[2]));

  SUBCASE("one cell equals the front bound") {
    const std::vector<EpsilonVector> grid = {EpsilonVector{0.02, 0.01}};
    const SweepResult one = sweep(f.model.program, f.front.points, grid, d);
    CHECK(one.thresholds[0] ==
          necessary_condition_multi(f.model.program, f.front.points, grid[0], d).threshold);
  }
  SUBCASE("parallel cells give identical thresholds") {
    const SweepResult par = sweep(f.model.program, f.front.points, levels, levels, d, default_backend(), 4);
    CHECK(par.thresholds == s.thresholds);
  }
  SUBCASE("a single resource reaches zero at 5 percent") {
    bool any_zero = false;
    for (const char* name : {"gas", "wind", "solar", "wood", "elec_import"}) {
      const NecessaryConditionReport r = necessary_condition_multi(f.model.program, f.front.points,
                                                                   EpsilonVector{0.05, 0.05}, f.model.selectors.at(name));
      any_zero = any_zero || std::abs(r.threshold) <= 1e-6;
    }
    CHECK(any_zero);
  }
  CHECK_THROWS_AS(sweep(f.model.program, f.front.points, std::vector<EpsilonVector>{}, d), ModelError);
}

TEST_CASE("cross-product grid layout") {
  const std::vector<Real> r = {0.1, 0.2};
  const std::vector<Real> c = {0.3, 0.4, 0.5};
  const auto grid = cross_product_grid(r, c);
  REQUIRE(grid.size() == 6);
  CHECK(grid[1][0] == 0.1);
  CHECK(grid[1][1] == 0.4);
  CHECK(grid[3][0] == 0.2);
  CHECK(default_sweep_levels() == std::vector<Real>{0.01, 0.02, 0.05, 0.10, 0.20, 0.50});
  CHECK(default_front_schedule() == std::vector<Real>{0.0025, 0.005, 0.01, 0.025, 0.05, 0.075});
  CHECK_THROWS_AS(EpsilonVector(vec({-0.1, 0.0})), ModelError);
}

TEST_CASE("more anchors never raise the bound on the grid model") {
  const Selector d = Selector::from_indices(grid_model().num_variables(), std::vector<std::size_t>{0});
  const std::vector<Real> xs = oracle::linspace(0.375, 0.75, 6);
  std::vector<Real> schedule;
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) schedule.push_back(f1(xs[i]) / 2.0 - 1.0);
  const ParetoFront big = generate_front(grid_model(), schedule, 1);
  const ParetoFront small = generate_front(grid_model(), {}, 1);
  const EpsilonVector eps{0.1, 0.1};
  CHECK(necessary_condition_multi(grid_model(), big.points, eps, d).threshold <=
        necessary_condition_multi(grid_model(), small.points, eps, d).threshold + 1e-6);
}
