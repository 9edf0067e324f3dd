#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "nearopt/analytic_oracle.hpp"
#include "nearopt/esom.hpp"
#include "nearopt/io.hpp"
#include "nearopt/nearopt.hpp"
#include "nearopt/pareto.hpp"
#include "support.hpp"

using namespace nearopt;

namespace {

Vector vec(std::initializer_list<Real> v) {
  return Eigen::Map<const Vector>(v.begin(), static_cast<Eigen::Index>(v.size()));
}

double f1(double x) { return 10.0 * (2.0 * x - 0.75) * (2.0 * x - 0.75) + 2.0; }
double f2(double x) { return 10.0 * (x - 0.75) * (x - 0.75) + 1.5; }

const LinearProgram& grid_model() {
  static const LinearProgram lp = oracle::quadratic_grid_program(oracle::ScalarFunctionPair{});
  return lp;
}

const LinearProgram& fixture() {
  static const LinearProgram lp =
      esom::compile(std::get<esom::EnergyModelSpec>(io::load_model(testing_support::fixture_path()))).program;
  return lp;
}

ParetoPoint tuple(std::initializer_list<Real> v) { return {Vector::Zero(1), vec(v), {}}; }

ParetoPoint tuple2(Real a, Real b) { return {Vector::Zero(1), vec({a, b}), {}}; }

// Pairwise O(m^2) reference: keep p unless some q is <= everywhere and < somewhere.
std::vector<std::size_t> brute_filter(const std::vector<ParetoPoint>& pts) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      if (i == j) continue;
      bool le = true;
      bool lt = false;
      for (Eigen::Index k = 0; k < pts[i].objectives.size(); ++k) {
        const double a = pts[j].objectives(k);
        const double b = pts[i].objectives(k);
        if (a > b + 1e-9) le = false;
        if (a < b - 1e-9) lt = true;
      }
      dominated = le && lt;
    }
    if (!dominated) kept.push_back(i);
  }
  return kept;
}

std::vector<std::size_t> positions(const std::vector<ParetoPoint>& all, const std::vector<ParetoPoint>& kept) {
  std::vector<std::size_t> out;
  std::size_t cursor = 0;
  for (const auto& k : kept) {
    while (cursor < all.size() && all[cursor].objectives != k.objectives) ++cursor;
    out.push_back(cursor++);
  }
  return out;
}

}  // namespace

TEST_CASE("individual optima of the grid model") {
  const AnchorTable t = individual_optima(grid_model());
  REQUIRE(t.anchors.size() == 2);
  CHECK(t.anchors[0].decision(0) == doctest::Approx(0.375));
  CHECK(t.anchors[0].objectives(0) == doctest::Approx(2.0));
  CHECK(t.anchors[1].decision(0) == doctest::Approx(0.75));
  CHECK(t.anchors[1].objectives(1) == doctest::Approx(1.5));
  // cross(k, i): f_k at the optimum of i
  CHECK(t.cross(1, 0) == doctest::Approx(f2(0.375)));
  CHECK(t.cross(0, 1) == doctest::Approx(f1(0.75)));
  CHECK(t.cross(0, 1) >= t.cross(0, 0));
  CHECK(t.cross(1, 0) >= t.cross(1, 1));
}

TEST_CASE("single-objective program yields one outcome equal to solve") {
  const LinearProgram lp = testing_support::min_sum_program();
  const AnchorTable t = individual_optima(lp);
  REQUIRE(t.outcomes.size() == 1);
  CHECK(*t.outcomes[0].objective_value == doctest::Approx(*solve(lp, 0).objective_value));
}

TEST_CASE("infeasible program aborts with the failing objective") {
  const LinearProgram lp({{"x", 0.0, 1.0}}, {{{{0, 1.0}}, Sense::GreaterEqual, 2.0, ""}},
                         {{vec({1.0}), 0.0, "a"}, {vec({-1.0}), 0.0, "b"}});
  try {
    individual_optima(lp);
    FAIL("expected FrontError");
  } catch (const FrontError& e) {
    CHECK(e.objective() == 0);
    CHECK(e.status() == SolveStatus::Infeasible);
  }
}

TEST_CASE("grid-model front reproduces the eleven-point list") {
  // Capping f1 at f1(x_i) = (1 + eps) * 2 and minimising f2 lands on x_i.
  const std::vector<Real> xs = oracle::linspace(0.375, 0.75, 11);
  std::vector<Real> schedule;
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) schedule.push_back(f1(xs[i]) / 2.0 - 1.0);
  const ParetoFront front = generate_front(grid_model(), schedule, 1);
  REQUIRE(front.size() == 11);
  const std::vector<std::pair<double, double>> list = {{2.0, 2.91},  {2.06, 2.64}, {2.23, 2.40}, {2.51, 2.19},
                                                       {2.9, 2.01},  {3.41, 1.85}, {4.03, 1.72}, {4.76, 1.63},
                                                       {5.61, 1.56}, {6.57, 1.51}, {7.62, 1.5}};
  for (std::size_t i = 0; i < list.size(); ++i) {
    CHECK(std::abs(oracle::round_significant(front.points[i].objectives(0), 3) - list[i].first) <= 0.01 + 1e-9);
    CHECK(std::abs(oracle::round_significant(front.points[i].objectives(1), 3) - list[i].second) <= 0.01 + 1e-9);
  }
  CHECK(front.warnings.empty());
}

TEST_CASE("schedule outside the admissible interval is rejected") {
  const AnchorTable t = individual_optima(grid_model());
  const Real limit = schedule_limit(t, 1, 0);
  CHECK(limit == doctest::Approx(f1(0.75) / 2.0 - 1.0));
  CHECK_THROWS_AS(generate_front(grid_model(), t, {0.0}, 1), ModelError);
  CHECK_THROWS_AS(generate_front(grid_model(), t, {limit}, 1), ModelError);
  CHECK_THROWS_AS(generate_front(grid_model(), t, {-0.1}, 1), ModelError);
}

TEST_CASE("empty schedule gives the anchors only") {
  const ParetoFront front = generate_front(grid_model(), {}, 1);
  REQUIRE(front.size() == 2);
  CHECK(front.points[0].provenance.method == Provenance::Method::Anchor);
  CHECK(front.points[1].provenance.method == Provenance::Method::Anchor);
  const SpreadReport s = spread_report(front);
  CHECK(s.coverage == 0.0);
}

TEST_CASE("energy fixture front with the default schedule") {
  const LinearProgram& lp = fixture();
  const ParetoFront front = generate_front(lp, default_front_schedule(), 1);
  REQUIRE(front.size() == 8);
  const AnchorTable t = individual_optima(lp);

  // Free objective non-increasing along increasing epsilon.
  std::vector<const ParetoPoint*> by_eps;
  for (const auto& p : front.points) {
    if (p.provenance.method == Provenance::Method::EpsilonConstraint) by_eps.push_back(&p);
  }
  std::sort(by_eps.begin(), by_eps.end(),
            [](auto* a, auto* b) { return a->provenance.parameter < b->provenance.parameter; });
  for (std::size_t i = 1; i < by_eps.size(); ++i) {
    CHECK(by_eps[i]->objectives(1) <= by_eps[i - 1]->objectives(1) * (1 + 1e-6));
  }
  // Sorted by f1 ascending, f2 strictly descending.
  for (std::size_t i = 1; i < front.size(); ++i) {
    CHECK(front.points[i].objectives(0) > front.points[i - 1].objectives(0));
    CHECK(front.points[i].objectives(1) < front.points[i - 1].objectives(1) - 1e-9);
  }
  // Endpoints are the individual optima.
  CHECK(front.points.front().objectives(0) == doctest::Approx(t.anchors[0].objectives(0)).epsilon(1e-6));
  CHECK(front.points.back().objectives(1) == doctest::Approx(t.anchors[1].objectives(1)).epsilon(1e-6));
  // Stored tuples equal evaluate() exactly.
  for (const auto& p : front.points) CHECK(p.objectives == evaluate_all(lp, p.decision));
  // Caps honoured.
  for (const auto* p : by_eps) {
    CHECK(p->objectives(0) <= (1 + p->provenance.parameter) * t.anchors[0].objectives(0) * (1 + 1e-7));
  }
}

TEST_CASE("front is independent of the number of jobs") {
  const ParetoFront a = generate_front(fixture(), default_front_schedule(), 1, default_backend(), {1, true});
  const ParetoFront b = generate_front(fixture(), default_front_schedule(), 1, default_backend(), {4, true});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.points[i].objectives == b.points[i].objectives);
}

TEST_CASE("a sub-schedule yields a subset of the front") {
  const ParetoFront small = generate_front(fixture(), {0.005, 0.05}, 1);
  const ParetoFront big = generate_front(fixture(), default_front_schedule(), 1);
  for (const auto& p : small.points) {
    bool found = false;
    for (const auto& q : big.points) found = found || (p.objectives - q.objectives).norm() <= 1e-6 * p.objectives.norm();
    CHECK(found);
  }
}

TEST_CASE("dominance filter examples") {
  CHECK(dominance_filter({tuple2(1, 2), tuple2(2, 1)}).size() == 2);
  const auto kept = dominance_filter({tuple2(1, 1), tuple2(2, 2)});
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].objectives == vec({1, 1}));
  CHECK(dominance_filter({}).empty());
  // Exact duplicates do not dominate each other.
  CHECK(dominance_filter({tuple2(1, 1), tuple2(1, 1)}).size() == 2);
  // Differences inside the tie tolerance are ties.
  CHECK(dominance_filter({tuple2(1, 1), tuple2(1 + 1e-12, 1)}).size() == 2);
  CHECK_THROWS_AS(dominance_filter({tuple2(1, 1), tuple({1, 1, 1})}), ModelError);
}

TEST_CASE("dominance filter equals the pairwise reference on random tuples") {
  std::mt19937_64 rng(11);
  for (int dims : {2, 3}) {
    for (int trial = 0; trial < 20; ++trial) {
      std::uniform_int_distribution<int> coord(0, 30);  // integer grid forces ties
      std::vector<ParetoPoint> pts;
      for (int i = 0; i < 100; ++i) {
        Vector v(dims);
        for (int k = 0; k < dims; ++k) v(k) = coord(rng);
        pts.push_back({Vector::Zero(1), v, {}});
      }
      const auto kept = dominance_filter(pts);
      CHECK(positions(pts, kept) == brute_filter(pts));
      for (const auto& a : kept) {
        for (const auto& b : kept) CHECK_FALSE(dominates(a.objectives, b.objectives));
      }
    }
  }
}

TEST_CASE("spread report") {
  SUBCASE("single point") {
    ParetoFront f;
    f.points = {tuple2(1, 1)};
    const SpreadReport s = spread_report(f);
    CHECK(s.count == 1);
    CHECK_FALSE(s.largest_gap.has_value());
    CHECK(s.coverage == 0.0);
  }
  SUBCASE("clustered list has a larger gap than the spread list") {
    const oracle::ScalarFunctionPair pair;
    auto make = [&](const std::vector<Eigen::Vector2d>& tuples) {
      ParetoFront f;
      for (const auto& t : tuples) f.points.push_back(tuple2(t(0), t(1)));
      f.anchors = {tuple2(f1(0.375), f2(0.375)), tuple2(f1(0.75), f2(0.75))};
      return spread_report(f);
    };
    const auto clustered = oracle::grid_pareto(pair, 11, oracle::ParetoSpacing::PrescribedX,
                                               oracle::linspace(0.525, 0.6, 11));
    const auto spread = oracle::grid_pareto(pair, 11, oracle::ParetoSpacing::ByX);
    const SpreadReport a = make(clustered);
    const SpreadReport b = make(spread);
    REQUIRE(a.largest_gap.has_value());
    REQUIRE(b.largest_gap.has_value());
    CHECK(*b.largest_gap < *a.largest_gap);
    CHECK(b.coverage > a.coverage);
    CHECK(b.coverage > 0.0);
    CHECK(b.coverage < 1.0);
  }
  SUBCASE("anchors-only energy front has zero coverage") {
    const ParetoFront f = generate_front(fixture(), {}, 1);
    CHECK(spread_report(f).coverage == 0.0);
  }
  CHECK_THROWS_AS(spread_report(ParetoFront{}), ModelError);
}
