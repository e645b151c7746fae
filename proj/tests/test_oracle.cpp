#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "altproj/oracle.hpp"
#include "altproj/random.hpp"
#include "test_util.hpp"

using namespace altproj;
using testutil::mat;
using testutil::vec;

TEST_CASE("grid projection matches closed forms within the refinement bound") {
  const Hyperplane plane(vec({0, 1}), 0.0);
  const auto grid = oracle::make_grid(-10.0, 10.0, 2, 33, 8);
  const Vector ref = oracle::brute_force_projection(plane, vec({3, 5}), grid);
  CHECK((ref - vec({3, 0})).norm() <= oracle::grid_error_bound(grid));
  CHECK((ref - vec({3, 0})).norm() <= 1e-4);

  const Polyhedron simplex(mat(3, 2, {1, 1, -1, 0, 0, -1}), vec({1, 0, 0}));
  const Vector sp = oracle::brute_force_projection(simplex, vec({1, 1}), grid);
  CHECK((sp - vec({0.5, 0.5})).norm() <= 1e-4);
}

TEST_CASE("doubling refinement levels divides the bound by 4^levels") {
  const auto g1 = oracle::make_grid(-10.0, 10.0, 2, 17, 4);
  const auto g2 = oracle::make_grid(-10.0, 10.0, 2, 17, 8);
  CHECK(oracle::grid_error_bound(g1) == 20.0 / std::pow(4.0, 4));
  CHECK(oracle::grid_error_bound(g2) == oracle::grid_error_bound(g1) / std::pow(4.0, 4));

  // The bound is honest on a closed-form case at both depths.
  const Ball ball(vec({0, 1}), 1.0);
  for (const auto& g : {g1, g2}) {
    const Vector p = oracle::brute_force_projection(ball, vec({0, -3}), g);
    CHECK((p - vec({0, 0})).norm() <= oracle::grid_error_bound(g) + 1e-12);
  }
}

TEST_CASE("grid search reports a missing set") {
  const Ball far_ball(vec({50, 50}), 1.0);
  CHECK_THROWS_AS(
      oracle::brute_force_projection(far_ball, vec({0, 0}), oracle::make_grid(-10.0, 10.0, 2, 17, 4)),
      NoFeasibleGridPoint);
}

TEST_CASE("vertex enumeration solves the corner cases") {
  // min x1 + x2  s.t. x1 + x2 >= 1, x >= 0: value 1 on the whole face.
  LinearProgram face(vec({1, 1}), mat(1, 2, {1, 1}), vec({1}), {true, true});
  const auto [x1, v1] = oracle::lp_vertex_solve(face);
  CHECK(std::abs(v1 - 1.0) <= 1e-12);
  CHECK(std::abs(x1.sum() - 1.0) <= 1e-12);

  // min x1  s.t.  0 <= x1 <= 1.
  LinearProgram box(vec({1}), mat(1, 1, {-1}), vec({-1}), {true});
  const auto [x2, v2] = oracle::lp_vertex_solve(box);
  CHECK(x2(0) == 0.0);
  CHECK(v2 == 0.0);
}

TEST_CASE("duplicate constraints do not change the optimum") {
  LinearProgram base(vec({1, 2}), mat(2, 2, {1, 1, 1, 0}), vec({1, 0.2}), {true, true});
  LinearProgram dup(vec({1, 2}), mat(4, 2, {1, 1, 1, 0, 1, 1, 1, 0}),
                    vec({1, 0.2, 1, 0.2}), {true, true});
  const auto [xa, va] = oracle::lp_vertex_solve(base);
  const auto [xb, vb] = oracle::lp_vertex_solve(dup);
  CHECK(std::abs(va - vb) <= 1e-12);
  CHECK((xa - xb).norm() <= 1e-12);
}

TEST_CASE("unbounded objectives are detected by the recession scan") {
  // min -x1 s.t. x1 >= 0: unbounded below.
  LinearProgram ray(vec({-1}), mat(1, 1, {1}), vec({0}), {true});
  CHECK_THROWS_AS(oracle::lp_vertex_solve(ray), UnboundedLp);

  // Two variables, only one bounded.
  LinearProgram half(vec({0, -1}), mat(1, 2, {1, 0}), vec({0}), {true, true});
  CHECK_THROWS_AS(oracle::lp_vertex_solve(half), UnboundedLp);
}

TEST_CASE("infeasible vertex search is reported") {
  // x1 >= 1 and -x1 >= 0 cannot hold together.
  LinearProgram impossible(vec({1}), mat(2, 1, {1, -1}), vec({1, 0}), {false});
  CHECK_THROWS_AS(oracle::lp_vertex_solve(impossible), InfeasibleLp);
}

TEST_CASE("best-pair grid search locates the transport pair") {
  const Polyhedron X = testutil::transport_upper();
  const Hyperplane H(vec({0, 1}), 0.0);
  const auto res = oracle::grid_best_pair(X, H, oracle::make_grid(-8.0, 8.0, 2, 33, 9));
  CHECK(std::abs(res.dist - 2.0) <= 1e-4);
  CHECK((res.x - vec({0, 2})).norm() <= 1e-3);
  CHECK((res.y - vec({0, 0})).norm() <= 1e-3);
}

TEST_CASE("best-pair grid search on the ball-line pair") {
  const Ball ball(vec({0, 1}), 1.0);
  const Hyperplane line(vec({0, 1}), -1.0);
  const auto res = oracle::grid_best_pair(ball, line, oracle::make_grid(-2.0, 2.0, 2, 33, 9));
  CHECK(std::abs(res.dist - 1.0) <= 1e-4);

  const auto same = oracle::grid_best_pair(ball, ball, oracle::make_grid(-2.0, 2.0, 2, 17, 6));
  CHECK(same.dist <= 1e-9);
}

TEST_CASE("subset enumeration projection equals the active-set result on random data") {
  SeededRng rng(31415);
  for (int inst = 0; inst < 50; ++inst) {
    auto poly = testutil::random_poly_instance(rng, 3, 5);
    const Vector a = oracle::enumerate_projection(poly.A, poly.b, poly.query);
    const Vector b = project_polyhedron(Polyhedron(poly.A, poly.b), poly.query);
    CHECK((a - b).norm() <= 1e-8);
  }
}
