#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "altproj/certify.hpp"
#include "altproj/random.hpp"
#include "altproj/solvers.hpp"
#include "test_util.hpp"

using namespace altproj;
using testutil::mat;
using testutil::vec;

namespace {

AffineSubspace x_axis3() { return AffineSubspace(vec({0, 0, 0}), mat(3, 1, {1, 0, 0})); }
AffineSubspace diag_line3(double gamma) {
  return AffineSubspace(vec({0, 0, gamma}), mat(3, 1, {1, 1, 0}));
}

}  // namespace

TEST_CASE("reverse lines follow the halving closed form, independent of the lift") {
  StopCriteria stop;
  stop.max_iter = 100;
  std::vector<RunResult> runs;
  for (double gamma : {0.0, 1.0, 5.0}) {
    runs.push_back(map_run(x_axis3(), diag_line3(gamma), vec({3, 7, -2}), stop));
  }
  for (const auto& run : runs) {
    CHECK(run.status == RunStatus::MaxIterReached);
    for (int k = 0; k <= 40; ++k) {
      Vector expect = vec({3.0 / std::pow(2.0, k), 0, 0});
      CHECK((run.trace.records[static_cast<std::size_t>(k)].iterate - expect).norm() <= 1e-12);
    }
  }
  for (std::size_t k = 0; k < runs[0].trace.records.size(); ++k) {
    for (std::size_t j = 1; j < runs.size(); ++j) {
      CHECK((runs[j].trace.records[k].iterate - runs[0].trace.records[k].iterate)
                .lpNorm<Eigen::Infinity>() <= 1e-14);
    }
  }
}

TEST_CASE("polyhedron vs line terminates finitely at the vertex") {
  StopCriteria stop;
  stop.max_iter = 300;
  const Polyhedron X = testutil::transport_upper();
  const Hyperplane H(vec({0, 1}), 0.0);
  SeededRng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector start = vec({rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0)});
    const RunResult run = map_run(X, H, start, stop);
    CHECK(run.status == RunStatus::FiniteTermination);
    CHECK((run.final_iterate - vec({0, 2})).norm() <= 1e-10);
    CHECK(*run.finite_k <= 200);
  }
}

TEST_CASE("a start in the nearest-point set is a fixed point from step zero") {
  StopCriteria stop;
  stop.max_iter = 50;
  const RunResult run = map_run(testutil::transport_upper(), Hyperplane(vec({0, 1}), 0.0),
                                vec({0, 2}), stop);
  CHECK(run.status == RunStatus::FiniteTermination);
  CHECK(*run.finite_k == 0);
  CHECK(run.best_pair.has_value());
  CHECK((run.best_pair->first - vec({0, 2})).norm() == 0.0);
  CHECK((run.best_pair->second - vec({0, 0})).norm() == 0.0);
}

TEST_CASE("cyclic projections capture the three-line cycle finitely") {
  std::vector<ConvexSet> lines;
  for (double level : {0.0, 1.0, 2.0}) lines.push_back(Hyperplane(vec({0, 1}), level));
  StopCriteria stop;
  stop.max_iter = 50;
  const CyclicResult res = cyclic_run(lines, vec({3, 5}), stop);
  CHECK(res.run.status == RunStatus::FiniteTermination);
  REQUIRE(res.cycle.has_value());
  REQUIRE(res.cycle->points.size() == 3);
  CHECK((res.cycle->points[0] - vec({3, 0})).norm() <= 1e-12);
  CHECK((res.cycle->points[1] - vec({3, 1})).norm() <= 1e-12);
  CHECK((res.cycle->points[2] - vec({3, 2})).norm() <= 1e-12);
}

TEST_CASE("the two-set cycle is the best approximation pair") {
  StopCriteria stop;
  stop.max_iter = 200;
  const CyclicResult res = cyclic_run({testutil::transport_lower(), testutil::transport_upper()},
                                      vec({5, 7}), stop);
  CHECK(res.run.status == RunStatus::FiniteTermination);
  REQUIRE(res.cycle.has_value());
  CHECK((res.cycle->points[0] - vec({0, 0})).norm() <= 1e-10);
  CHECK((res.cycle->points[1] - vec({0, 2})).norm() <= 1e-10);
}

TEST_CASE("a start that already provides a cycle terminates at zero") {
  std::vector<ConvexSet> lines;
  for (double level : {0.0, 1.0, 2.0}) lines.push_back(Hyperplane(vec({0, 1}), level));
  StopCriteria stop;
  stop.max_iter = 50;
  const CyclicResult res = cyclic_run(lines, vec({3, 0}), stop);
  CHECK(res.run.status == RunStatus::FiniteTermination);
  CHECK(*res.run.finite_k == 0);
}

TEST_CASE("a too-short cyclic run reports no cycle") {
  StopCriteria stop;
  stop.max_iter = 2;
  stop.stall_window = 5;
  const CyclicResult res = cyclic_run({testutil::transport_lower(), testutil::transport_upper()},
                                      vec({40, -35}), stop);
  CHECK(res.run.status == RunStatus::MaxIterReached);
  CHECK(!res.cycle.has_value());
}

TEST_CASE("simultaneous projections: finite for the polyhedron pair only") {
  StopCriteria stop;
  stop.max_iter = 10000;
  const Polyhedron X = testutil::transport_upper();
  const Polyhedron Y = testutil::transport_lower();
  const Hyperplane H(vec({0, 1}), 0.0);

  const CimminoResult yx = cimmino_run({Y, X}, vec({5, 7}), stop);
  CHECK(yx.run.status == RunStatus::FiniteTermination);
  CHECK((yx.run.final_iterate - vec({0, 1})).norm() <= 1e-10);

  const CimminoResult hx = cimmino_run({H, X}, vec({5, 7}), stop);
  CHECK(hx.run.status == RunStatus::ConvergedToTol);
  CHECK((hx.run.final_iterate - vec({0, 1})).norm() <= 1e-8);

  // The recorded alternating-step residual stabilizes at zero for the pair
  // that terminates finitely.
  REQUIRE(!yx.shadow_residuals.empty());
  CHECK(yx.shadow_residuals.back() == 0.0);
}

TEST_CASE("the midpoint of the best pair is a fixed point of the average") {
  StopCriteria stop;
  stop.max_iter = 50;
  const CimminoResult res = cimmino_run(
      {testutil::transport_lower(), testutil::transport_upper()}, vec({0, 1}), stop);
  CHECK(res.run.status == RunStatus::FiniteTermination);
  CHECK(*res.run.finite_k == 0);
}

TEST_CASE("Douglas-Rachford on a halfspace gap: governing diverges, shadow settles") {
  const Halfspace X(vec({0, 1}), 0.0);   // x2 <= 0
  const Halfspace Yup(vec({0, -1}), -1.0);  // x2 >= 1
  StopCriteria stop;
  stop.max_iter = 300;
  stop.divergence_norm = 50.0;
  const DrResult res = dr_run(X, Yup, vec({0, 0}), stop);
  CHECK(res.governing.status == RunStatus::Diverged);

  // Closed-form recursion: v_{k+1} = (v_k + r(v_k))/2 on the second
  // coordinate, iterated independently as the oracle.
  double v = 0.0;
  for (std::size_t k = 1; k < res.governing.trace.records.size(); ++k) {
    const double u = 2.0 * std::min(v, 0.0) - v;
    const double r = 2.0 * std::max(u, 1.0) - u;
    v = 0.5 * (v + r);
    CHECK(std::abs(res.governing.trace.records[k].iterate(1) - v) <= 1e-12);
    CHECK(res.governing.trace.records[k].iterate(0) == 0.0);
  }

  CHECK(std::abs(res.shadow.back().iterate(1)) <= 1e-12);
  CHECK(res.best_pair.has_value());
}

TEST_CASE("Douglas-Rachford on a consistent pair converges with shadow in the intersection") {
  const Ball ball(vec({0, 1}), 1.0);
  StopCriteria stop;
  stop.max_iter = 500;
  const DrResult res = dr_run(ball, ball, vec({3, -2}), stop);
  CHECK(res.governing.status != RunStatus::Diverged);
  CHECK(distance(ball, res.shadow.back().iterate) <= 1e-9);
}

TEST_CASE("Douglas-Rachford transport pair: shadow limit and stabilized composition") {
  const Polyhedron X = testutil::transport_upper();
  const Polyhedron Y = testutil::transport_lower();
  StopCriteria stop;
  stop.max_iter = 5000;
  stop.divergence_norm = 1e3;
  const DrResult res = dr_run(X, Y, vec({5, 7}), stop);
  CHECK(res.governing.status == RunStatus::Diverged);
  CHECK((res.shadow.back().iterate - vec({0, 2})).norm() <= 1e-8);

  // The alternating-step image of the shadow pins the nearest point
  // exactly over the whole tail.
  const auto& recs = res.shadow.records;
  for (std::size_t k = recs.size() - 5; k < recs.size(); ++k) {
    const Vector w = project(X, project(Y, recs[k].iterate));
    CHECK((w - vec({0, 2})).norm() <= 1e-10);
  }
}

TEST_CASE("product-space lift: one lifted alternating step is one averaged step") {
  const Halfspace lower(vec({0, 1}), 0.0);
  const Halfspace upper(vec({0, -1}), -1.0);
  auto [product, diagonal] = pierra_lift({lower, upper});

  const Vector z = vec({0.3, -1.7});
  const Vector lifted = diagonal_embed(z, 2);
  const Vector step = project(ConvexSet(diagonal), project(ConvexSet(product), lifted));
  const Vector avg = 0.5 * (project(lower, z) + project(upper, z));
  CHECK((step.head(2) - avg).norm() == 0.0);
  CHECK((step.tail(2) - avg).norm() == 0.0);
}

TEST_CASE("three singleton factors average exactly") {
  std::vector<ConvexSet> points;
  for (double t : {0.0, 1.0, 2.0}) {
    points.push_back(AffineSubspace(Vector::Constant(1, t), Matrix(1, 0)));
  }
  auto [product, diagonal] = pierra_lift(points);
  const Vector z = Vector::Constant(1, 5.0);
  const Vector step = project(ConvexSet(diagonal), project(ConvexSet(product), diagonal_embed(z, 3)));
  CHECK(step(0) == 1.0);
  CHECK(step(1) == 1.0);
  CHECK(step(2) == 1.0);
}

TEST_CASE("lifted runs match simultaneous runs step by step on random instances") {
  SeededRng rng(606);
  StopCriteria stop;
  stop.max_iter = 60;
  for (int inst = 0; inst < 50; ++inst) {
    const int m = 2 + static_cast<int>(rng.uniform() * 3.0);
    std::vector<ConvexSet> sets;
    for (int i = 0; i < m; ++i) {
      if (rng.uniform() < 0.5) {
        Vector n = rng.gaussian_vector(2);
        if (n.norm() < 1e-3) n << 1, 0;
        sets.push_back(Halfspace(n, rng.uniform(-2.0, 2.0)));
      } else {
        sets.push_back(Ball(rng.gaussian_vector(2), rng.uniform(0.5, 2.0)));
      }
    }
    const Vector z0 = rng.gaussian_vector(2) * 2.0;
    const CimminoResult avg = cimmino_run(sets, z0, stop);
    auto [product, diagonal] = pierra_lift(sets);
    const RunResult lifted =
        map_run(ConvexSet(diagonal), ConvexSet(product), diagonal_embed(z0, m), stop);

    const std::size_t upto = std::min(avg.run.trace.records.size(), lifted.trace.records.size());
    for (std::size_t k = 0; k < upto; ++k) {
      for (int i = 0; i < m; ++i) {
        CHECK((lifted.trace.records[k].iterate.segment(2 * i, 2) - avg.run.trace.records[k].iterate)
                  .lpNorm<Eigen::Infinity>() <= 1e-14);
      }
    }
  }
}

TEST_CASE("displacement estimates") {
  StopCriteria stop;
  stop.max_iter = 400;
  const RunResult xh = map_run(testutil::transport_upper(), Hyperplane(vec({0, 1}), 0.0),
                               vec({4, -3}), stop);
  CHECK((displacement_estimate(xh.trace) - vec({0, 2})).norm() <= 1e-10);
  CHECK(std::abs(displacement_estimate(xh.trace).norm() - 2.0) <= 1e-10);

  // Consistent instance: the gap estimate vanishes.
  const RunResult same = map_run(Hyperplane(vec({0, 1}), 0.0), Hyperplane(vec({0, 1}), 0.0),
                                 vec({1, 1}), stop);
  CHECK(displacement_estimate(same.trace).norm() <= 1e-12);

  // Ball vs shifted line: the gap estimate approaches (0, eps).
  const double eps = 0.25;
  const RunResult ball_run = map_run(Ball(vec({0, 1}), 1.0), Hyperplane(vec({0, 1}), -eps),
                                     vec({1, 1}), stop);
  CHECK((displacement_estimate(ball_run.trace) - vec({0, eps})).norm() <= 1e-8);

  IterationTrace empty;
  CHECK_THROWS_AS(displacement_estimate(empty), EmptyTrace);
}

TEST_CASE("finite-termination detector") {
  StopCriteria stop;
  stop.max_iter = 500;

  const RunResult finite = map_run(testutil::transport_upper(), Hyperplane(vec({0, 1}), 0.0),
                                   vec({9, -1}), stop);
  const auto k_bar = detect_finite_termination(finite.trace, stop);
  REQUIRE(k_bar.has_value());
  CHECK(*k_bar == *finite.finite_k);

  const RunResult halving = map_run(x_axis3(), diag_line3(1.0), vec({3, 7, -2}), stop);
  CHECK(!detect_finite_termination(halving.trace, stop).has_value());

  const RunResult constant = map_run(testutil::transport_upper(), Hyperplane(vec({0, 1}), 0.0),
                                     vec({0, 2}), stop);
  CHECK(detect_finite_termination(constant.trace, stop) == 0);
}

TEST_CASE("map runs are Fejer monotone and Y-distances never increase") {
  StopCriteria stop;
  stop.max_iter = 400;
  struct Case {
    ConvexSet X;
    ConvexSet Y;
    Vector start;
    Vector fixed;  // known limit
  };
  std::vector<Case> cases;
  cases.push_back({testutil::transport_upper(), Hyperplane(vec({0, 1}), 0.0), vec({7, -9}),
                   vec({0, 2})});
  cases.push_back({Ball(vec({0, 1}), 1.0), Hyperplane(vec({0, 1}), -1.0), vec({1, 1}),
                   vec({0, 0})});
  cases.push_back({ConvexSet(x_axis3()), ConvexSet(diag_line3(1.0)), vec({3, 7, -2}),
                   vec({0, 0, 0})});

  for (const auto& c : cases) {
    const RunResult run = map_run(c.X, c.Y, c.start, stop);
    const auto& recs = run.trace.records;
    for (std::size_t k = 0; k + 1 < recs.size(); ++k) {
      CHECK((recs[k + 1].iterate - c.fixed).norm() <=
            (recs[k].iterate - c.fixed).norm() + 1e-12);
      CHECK(recs[k + 1].dist_to_y <= recs[k].dist_to_y + 1e-12);
    }
    // Displacement increments trend to zero along the trace.
    const std::size_t last = recs.size() - 1;
    const double head = (recs[1].displacement - recs[0].displacement).norm();
    const double tail = (recs[last].displacement - recs[last - 1].displacement).norm();
    CHECK(tail <= head + 1e-12);
  }
}

TEST_CASE("finite-termination iterates satisfy the fixed-point gap identity") {
  StopCriteria stop;
  stop.max_iter = 400;
  const RunResult run = map_run(testutil::transport_upper(), Hyperplane(vec({0, 1}), 0.0),
                                vec({11, 3}), stop);
  REQUIRE(run.status == RunStatus::FiniteTermination);
  const double dist_y = distance(Hyperplane(vec({0, 1}), 0.0), run.final_iterate);
  CHECK(std::abs(dist_y - displacement_estimate(run.trace).norm()) <= 1e-8);
}

TEST_CASE("projections onto the two nearest-point sets differ by the gap vector") {
  // Parallel hyperplanes: both nearest-point sets are the planes themselves.
  const Hyperplane X(vec({0, 1}), 1.0);
  const Hyperplane Y(vec({0, 1}), 0.0);
  StopCriteria stop;
  stop.max_iter = 100;
  certify::BestPairEstimate est = certify::estimate_best_pair(X, Y, vec({0.3, 0.7}), stop);
  auto members_x = certify::nearest_set_members_x(est);
  auto members_y = certify::nearest_set_members_y(est);
  REQUIRE(members_x.has_value());
  REQUIRE(members_y.has_value());

  SeededRng rng(17);
  for (int i = 0; i < 40; ++i) {
    const Vector z = rng.gaussian_vector(2) * 3.0;
    const Vector px = project_onto_members(*members_x, z, &est.x_bar);
    const Vector py = project_onto_members(*members_y, z, &est.y_bar);
    CHECK((py - (px - est.d)).norm() <= 1e-8);
  }
}

TEST_CASE("divergence guard fires on far starts") {
  StopCriteria stop;
  stop.max_iter = 100;
  stop.divergence_norm = 10.0;
  const RunResult run = map_run(testutil::transport_upper(), Hyperplane(vec({0, 1}), 0.0),
                                vec({100, 0}), stop);
  CHECK(run.status == RunStatus::Diverged);
}

TEST_CASE("solver argument validation") {
  StopCriteria stop;
  CHECK_THROWS_AS(map_run(Ball(vec({0, 0}), 1.0), Hyperplane(vec({1}), 0.0), vec({0, 0}), stop),
                  DimensionMismatch);
  CHECK_THROWS_AS(cimmino_run({Ball(vec({0, 0}), 1.0)}, vec({0, 0}), stop), Error);
}
