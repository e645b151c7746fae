#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "altproj/apps.hpp"
#include "altproj/certify.hpp"
#include "altproj/oracle.hpp"
#include "altproj/random.hpp"
#include "test_util.hpp"

using namespace altproj;
using testutil::mat;
using testutil::vec;

namespace {

StopCriteria stop_of(int iters) {
  StopCriteria stop;
  stop.max_iter = iters;
  return stop;
}

// Solvable random LP: feasibility by construction, boundedness via a
// strictly positive cost, dual feasibility via c >= A' y.
struct RandomLp {
  LinearProgram lp;
  Vector dual;
};

RandomLp random_lp(SeededRng& rng, int n, int m) {
  Matrix A(m, n);
  Vector feas(n);
  for (int j = 0; j < n; ++j) feas(j) = rng.uniform(0.0, 2.0);
  Vector b(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) A(i, j) = rng.uniform(-1.0, 1.0);
    b(i) = A.row(i).dot(feas) - rng.uniform(0.1, 1.5);
  }
  Vector dual(m);
  for (int i = 0; i < m; ++i) dual(i) = rng.uniform(0.0, 0.5);
  Vector c = A.transpose() * dual;
  for (int j = 0; j < n; ++j) c(j) = std::max(c(j), 0.0) + rng.uniform(0.1, 1.0);
  return RandomLp{LinearProgram(c, A, b, std::vector<bool>(static_cast<std::size_t>(n), true)),
                  dual};
}

}  // namespace

TEST_CASE("face LP: value one anywhere on the optimal face") {
  LinearProgram lp(vec({1, 1}), mat(1, 2, {1, 1}), vec({1}), {true, true});
  apps::LpSolveResult sol = apps::lp_solve_via_map(lp, Vector::Ones(1), 0.5, vec({3, -1}), stop_of(300));
  CHECK(sol.run.status == RunStatus::FiniteTermination);
  CHECK(std::abs(sol.value - 1.0) <= 1e-10);
  CHECK(sol.x.minCoeff() >= -1e-9);
  CHECK(std::abs(sol.x.sum() - 1.0) <= 1e-9);
}

TEST_CASE("interval LP: optimum at the lower bound") {
  LinearProgram lp(vec({1}), mat(1, 1, {-1}), vec({-1}), {true});
  apps::LpSolveResult sol = apps::lp_solve_via_map(lp, Vector::Zero(1), 1.0, vec({0.7}), stop_of(300));
  CHECK(sol.run.status == RunStatus::FiniteTermination);
  CHECK(std::abs(sol.value) <= 1e-10);
}

TEST_CASE("random LPs match the vertex oracle with finite termination") {
  SeededRng rng(2718);
  for (int seed_case = 0; seed_case < 20; ++seed_case) {
    const int n = 2 + static_cast<int>(rng.uniform() * 3.0);  // 2..4
    const int m = 2 + static_cast<int>(rng.uniform() * 5.0);  // 2..6
    RandomLp inst = random_lp(rng, std::min(n, 4), std::min(m, 6));
    CAPTURE(seed_case);

    const auto [xv, oracle_value] = oracle::lp_vertex_solve(inst.lp);
    (void)xv;
    Vector x0(inst.lp.num_vars());
    for (int j = 0; j < x0.size(); ++j) x0(j) = rng.uniform(-2.0, 2.0);
    apps::LpSolveResult sol =
        apps::lp_solve_via_map(inst.lp, inst.dual, rng.uniform(0.5, 2.0), x0, stop_of(2000));

    CHECK(sol.run.status == RunStatus::FiniteTermination);
    CHECK(std::abs(sol.value - oracle_value) <= 1e-8);

    // Feasibility certificate.
    CHECK((inst.lp.A * sol.x - inst.lp.b).minCoeff() >= -1e-9);
    CHECK(sol.x.minCoeff() >= -1e-9);

    // The gap vector aligns with the cost.
    const Vector ghat = sol.gap / sol.gap.norm();
    const Vector chat = inst.lp.c / inst.lp.c.norm();
    CHECK(ghat.dot(chat) > 0.0);
    CHECK((ghat - ghat.dot(chat) * chat).norm() <= 1e-8);
  }
}

TEST_CASE("dual validation rejects infeasible points") {
  LinearProgram lp(vec({1, 1}), mat(1, 2, {1, 1}), vec({1}), {true, true});
  CHECK_THROWS_AS(apps::lp_solve_via_map(lp, -Vector::Ones(1), 0.5, vec({0, 0}), stop_of(100)),
                  DualInfeasible);
  CHECK_THROWS_AS(apps::lp_solve_via_map(lp, 5.0 * Vector::Ones(1), 0.5, vec({0, 0}), stop_of(100)),
                  DualInfeasible);
}

TEST_CASE("a farther target level never needs more iterations") {
  LinearProgram lp(vec({1, 1}), mat(1, 2, {1, 1}), vec({1}), {true, true});
  const Vector x0 = vec({4, 2});
  int prev_iters = std::numeric_limits<int>::max();
  for (double eps : {0.1, 1.0, 10.0}) {
    apps::LpSolveResult sol = apps::lp_solve_via_map(lp, Vector::Ones(1), eps, x0, stop_of(2000));
    REQUIRE(sol.run.status == RunStatus::FiniteTermination);
    CHECK(*sol.run.finite_k <= prev_iters);
    prev_iters = *sol.run.finite_k;
  }
}

TEST_CASE("absolute-value min-max terminates finitely at the kink") {
  apps::MinMaxProblem p;
  p.pieces.push_back(apps::AffinePiece{Vector::Ones(1), 0.0});
  p.pieces.push_back(apps::AffinePiece{-Vector::Ones(1), 0.0});
  p.beta = -1.0;
  apps::MinMaxResult res = apps::minmax_solve(p, 0.7 * Vector::Ones(1), stop_of(200));
  CHECK(res.run.status == RunStatus::FiniteTermination);
  CHECK(res.x.norm() <= 1e-10);
  CHECK(std::abs(res.value) <= 1e-10);
}

TEST_CASE("a redundant affine piece changes nothing") {
  apps::MinMaxProblem p;
  p.pieces.push_back(apps::AffinePiece{Vector::Ones(1), 0.0});
  p.pieces.push_back(apps::AffinePiece{-Vector::Ones(1), 0.0});
  p.pieces.push_back(apps::AffinePiece{Vector::Ones(1), -0.5});
  p.beta = -2.0;
  apps::MinMaxResult res = apps::minmax_solve(p, -0.4 * Vector::Ones(1), stop_of(200));
  CHECK(res.run.status == RunStatus::FiniteTermination);
  CHECK(res.x.norm() <= 1e-10);
  CHECK(std::abs(res.value) <= 1e-10);

  // Oracle cross-check through the vertex form.
  const auto [xo, vo] = oracle::lp_vertex_solve(LinearProgram(
      vec({0, 1}), mat(3, 2, {-1, 1, 1, 1, -1, 1}), vec({0, 0, -0.5}), {false, false}));
  (void)xo;
  CHECK(std::abs(res.value - vo) <= 1e-10);
}

TEST_CASE("quadratic min-max converges to the crossing of the two parabolas") {
  apps::MinMaxProblem p;
  p.pieces.push_back(apps::QuadraticPiece{mat(1, 1, {2}), Vector::Zero(1), 0.0});
  p.pieces.push_back(apps::QuadraticPiece{mat(1, 1, {2}), -2.0 * Vector::Ones(1), 1.0});
  p.beta = -1.0;
  apps::MinMaxResult res = apps::minmax_solve(p, 0.9 * Vector::Ones(1), stop_of(3000));

  // Golden-section oracle on g(x) = max(x^2, (x-1)^2).
  auto g = [](double x) { return std::max(x * x, (x - 1.0) * (x - 1.0)); };
  double lo = -1.0, hi = 2.0;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
  for (int it = 0; it < 200; ++it) {
    if (g(a) < g(b)) {
      hi = b;
    } else {
      lo = a;
    }
    a = hi - phi * (hi - lo);
    b = lo + phi * (hi - lo);
  }
  const double xstar = 0.5 * (lo + hi);
  CHECK(std::abs(xstar - 0.5) <= 1e-10);

  CHECK(std::abs(res.x(0) - xstar) <= 1e-8);
  CHECK(std::abs(res.value - 0.25) <= 1e-8);
}

TEST_CASE("beta at or above the optimum is rejected") {
  apps::MinMaxProblem p;
  p.pieces.push_back(apps::AffinePiece{Vector::Ones(1), 0.0});
  p.pieces.push_back(apps::AffinePiece{-Vector::Ones(1), 0.0});
  p.beta = 0.0;  // equals g*
  CHECK_THROWS_AS(apps::minmax_solve(p, 0.3 * Vector::Ones(1), stop_of(200)), BetaNotBelowOptimum);

  // Quadratic pieces skip the oracle pre-check but the run detects it.
  apps::MinMaxProblem q;
  q.pieces.push_back(apps::QuadraticPiece{mat(1, 1, {2}), Vector::Zero(1), 0.0});
  q.beta = 0.5;
  CHECK_THROWS_AS(apps::minmax_solve(q, 0.5 * Vector::Ones(1), stop_of(3000)), BetaNotBelowOptimum);
}

TEST_CASE("contraction rates track 1/(1+eps) and the closed-form recursion") {
  StopCriteria stop = stop_of(2000);
  const auto rows = apps::holder_rate_experiment({0.0, 0.1, 1.0}, stop);
  REQUIRE(rows.size() == 3);

  CHECK(rows[0].rate >= 0.999);  // sublinear tail
  CHECK(std::abs(rows[1].rate - 1.0 / 1.1) <= 1e-3);
  CHECK(std::abs(rows[2].rate - 0.5) <= 1e-3);

  // The measured iterates obey x -> x / sqrt(x^2 + (1+eps)^2), iterated
  // here independently.
  const double eps = 1.0;
  const Ball X(vec({0, 1}), 1.0);
  const Hyperplane line(vec({0, 1}), -eps);
  RunResult run = map_run(line, X, vec({1, -eps}), stop);
  double a = 1.0;
  for (std::size_t k = 0; k + 1 < run.trace.records.size() && k < 60; ++k) {
    CHECK(std::abs(run.trace.records[k].iterate(0) - a) <= 1e-12 * std::max(1.0, std::abs(a)));
    a = a / std::sqrt(a * a + (1.0 + eps) * (1.0 + eps));
  }
}

TEST_CASE("eps grid validation") {
  CHECK_THROWS_AS(apps::holder_rate_experiment({-0.5}, stop_of(100)), Error);
  CHECK_THROWS_AS(apps::holder_rate_experiment({11.0}, stop_of(100)), Error);
}

TEST_CASE("the example registry builds and matches the schema") {
  for (apps::ExampleId id : apps::all_example_ids()) {
    apps::ExampleProblem ex = apps::build_example(id);
    CHECK(ex.problem.sets.size() >= 2);
    CHECK(ex.problem.start.size() == ex.problem.dimension);
    CHECK(!ex.named_sets.empty());
    CHECK(ex.problem.metadata.at("example").get<std::string>() == apps::to_string(id));
    CHECK(apps::parse_example_id(apps::to_string(id)) == id);
  }
  CHECK_THROWS_AS(apps::parse_example_id("no-such-example"), UnknownExample);
}
