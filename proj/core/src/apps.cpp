#include "altproj/apps.hpp"

#include <algorithm>
#include <cmath>

#include "altproj/oracle.hpp"

namespace altproj::apps {

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Vector vec3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

int piece_dim(const Piece& piece) {
  if (const auto* aff = std::get_if<AffinePiece>(&piece)) return static_cast<int>(aff->a.size());
  return static_cast<int>(std::get<QuadraticPiece>(piece).q.size());
}

// Epigraph constraint of one piece over (x, t).
ConvexSet piece_epigraph(const Piece& piece, int n) {
  if (const auto* aff = std::get_if<AffinePiece>(&piece)) {
    Vector normal(n + 1);
    normal.head(n) = aff->a;
    normal(n) = -1.0;
    return Halfspace(normal, -aff->b);
  }
  const auto& quad = std::get<QuadraticPiece>(piece);
  return QuadraticEpigraph(quad.Q, quad.q, quad.c);
}

}  // namespace

double evaluate_piece(const Piece& piece, const Vector& x) {
  if (const auto* aff = std::get_if<AffinePiece>(&piece)) return aff->a.dot(x) + aff->b;
  const auto& quad = std::get<QuadraticPiece>(piece);
  return 0.5 * x.dot(quad.Q * x) + quad.q.dot(x) + quad.c;
}

double evaluate_max(const MinMaxProblem& p, const Vector& x) {
  double g = -std::numeric_limits<double>::infinity();
  for (const auto& piece : p.pieces) g = std::max(g, evaluate_piece(piece, x));
  return g;
}

LpSolveResult lp_solve_via_map(const LinearProgram& lp, const Vector& dual_point, double eps,
                               const Vector& x0, const StopCriteria& stop) {
  if (!(eps > 0.0)) throw Error("eps must be positive");
  if (dual_point.size() != lp.num_rows()) throw DimensionMismatch("dual point dimension mismatch");
  const double dscale = std::max(1.0, dual_point.lpNorm<Eigen::Infinity>());
  if (dual_point.minCoeff() < -1e-9 * dscale) throw DualInfeasible("dual point must be nonnegative");
  Vector slack = lp.c - lp.A.transpose() * dual_point;
  if (slack.minCoeff() < -1e-9 * std::max(1.0, lp.c.lpNorm<Eigen::Infinity>())) {
    throw DualInfeasible("dual point violates A' y <= c");
  }

  const double level = lp.b.dot(dual_point) - eps;
  const Hyperplane target(lp.c, level);
  const Polyhedron region = lp.feasible_region();

  LpSolveResult out;
  out.run = map_run(region, target, x0, stop);
  out.x = out.run.final_iterate;
  out.value = lp.c.dot(out.x);
  out.gap = out.x - project(target, out.x);

  const double gn = out.gap.norm();
  if (gn <= 1e-14) throw Error("degenerate gap: the target level touches the feasible region");
  const Vector ghat = out.gap / gn;
  const Vector chat = lp.c / lp.c.norm();
  const double align = ghat.dot(chat);
  const double sine = (ghat - align * chat).norm();
  if (!(align > 0.0) || sine > 1e-8) {
    throw Error("gap vector is not a positive multiple of the cost");
  }
  return out;
}

MinMaxResult minmax_solve(const MinMaxProblem& p, const Vector& x0, const StopCriteria& stop) {
  if (p.pieces.empty()) throw Error("min-max requires at least one piece");
  const int n = piece_dim(p.pieces.front());
  for (const auto& piece : p.pieces) {
    if (piece_dim(piece) != n) throw DimensionMismatch("pieces must share one dimension");
  }
  if (x0.size() != n) throw DimensionMismatch("start point dimension mismatch");

  const bool all_affine =
      std::all_of(p.pieces.begin(), p.pieces.end(),
                  [](const Piece& piece) { return std::holds_alternative<AffinePiece>(piece); });

  // Oracle check of beta on small affine instances; quadratic lower bounds
  // stay user-asserted.
  if (all_affine && n + 1 <= 8 && static_cast<int>(p.pieces.size()) <= 20) {
    Matrix A(static_cast<int>(p.pieces.size()), n + 1);
    Vector b(static_cast<int>(p.pieces.size()));
    for (std::size_t i = 0; i < p.pieces.size(); ++i) {
      const auto& aff = std::get<AffinePiece>(p.pieces[i]);
      A.row(static_cast<int>(i)).head(n) = -aff.a.transpose();
      A(static_cast<int>(i), n) = 1.0;
      b(static_cast<int>(i)) = aff.b;
    }
    Vector c = Vector::Zero(n + 1);
    c(n) = 1.0;
    try {
      const auto [xopt, gstar] = oracle::lp_vertex_solve(
          LinearProgram(c, A, b, std::vector<bool>(static_cast<std::size_t>(n) + 1, false)));
      (void)xopt;
      if (p.beta >= gstar - 1e-12 * std::max(1.0, std::abs(gstar))) {
        throw BetaNotBelowOptimum("beta is not strictly below the optimal value");
      }
    } catch (const UnboundedLp&) {
      // g unbounded below: any beta misses it; the run will diverge honestly.
    } catch (const InfeasibleLp&) {
      // No vertex (non-pointed epigraph); skip the pre-check.
    }
  }

  const double g0 = evaluate_max(p, x0);
  Vector z0(n + 1);
  z0.head(n) = x0;
  z0(n) = g0;

  ConvexSet epi = [&]() -> ConvexSet {
    if (all_affine) {
      Matrix A(static_cast<int>(p.pieces.size()), n + 1);
      Vector b(static_cast<int>(p.pieces.size()));
      for (std::size_t i = 0; i < p.pieces.size(); ++i) {
        const auto& aff = std::get<AffinePiece>(p.pieces[i]);
        A.row(static_cast<int>(i)).head(n) = aff.a.transpose();
        A(static_cast<int>(i), n) = -1.0;
        b(static_cast<int>(i)) = -aff.b;
      }
      return Polyhedron(A, b);
    }
    std::vector<ConvexSet> members;
    members.reserve(p.pieces.size());
    for (const auto& piece : p.pieces) members.push_back(piece_epigraph(piece, n));
    Vector slater(n + 1);
    slater.head(n) = x0;
    slater(n) = g0 + 1.0;
    return IntersectionSet(std::move(members), slater);
  }();

  Vector hnormal = Vector::Zero(n + 1);
  hnormal(n) = 1.0;
  const Hyperplane level(hnormal, p.beta);

  MinMaxResult out;
  out.run = map_run(epi, level, z0, stop);
  if (out.run.status == RunStatus::Diverged) {
    throw Error("min-max run diverged (objective likely unbounded below)");
  }
  const double detected_gap = displacement_estimate(out.run.trace).norm();
  if (detected_gap <= 1e-8) {
    throw BetaNotBelowOptimum("runs detected a consistent instance: beta >= min-max value");
  }
  out.x = out.run.final_iterate.head(n);
  out.value = out.run.final_iterate(n);
  return out;
}

const char* to_string(ExampleId id) {
  switch (id) {
    case ExampleId::ReverseLines: return "reverse-lines";
    case ExampleId::BallHyperplane: return "ball-hyperplane";
    case ExampleId::BapebVsTransversality: return "bapeb-vs-transversality";
    case ExampleId::ProductTransport: return "product-transport";
    case ExampleId::LpDemo: return "lp-demo";
    case ExampleId::MinmaxDemo: return "minmax-demo";
    case ExampleId::ParallelLinesCycle: return "parallel-lines-cycle";
  }
  return "unknown";
}

ExampleId parse_example_id(const std::string& name) {
  for (ExampleId id : all_example_ids()) {
    if (name == to_string(id)) return id;
  }
  throw UnknownExample("unknown example id '" + name + "'");
}

std::vector<ExampleId> all_example_ids() {
  return {ExampleId::ReverseLines,    ExampleId::BallHyperplane, ExampleId::BapebVsTransversality,
          ExampleId::ProductTransport, ExampleId::LpDemo,         ExampleId::MinmaxDemo,
          ExampleId::ParallelLinesCycle};
}

ExampleProblem build_example(ExampleId id) {
  ExampleProblem ex;
  ex.problem.metadata["example"] = to_string(id);

  switch (id) {
    case ExampleId::ReverseLines: {
      Matrix e1(3, 1);
      e1 << 1, 0, 0;
      Matrix diag(3, 1);
      diag << 1, 1, 0;
      AffineSubspace axis(vec3(0, 0, 0), e1);
      auto line_at = [&](double gamma) { return AffineSubspace(vec3(0, 0, gamma), diag); };
      ex.problem.dimension = 3;
      ex.problem.sets = {axis, line_at(1.0)};
      ex.problem.start = vec3(3, 7, -2);
      ex.problem.method = io::Method::Map;
      ex.problem.stop.max_iter = 100;
      ex.named_sets.emplace("X", axis);
      ex.named_sets.emplace("Y", line_at(1.0));
      ex.named_sets.emplace("Y_gamma_0", line_at(0.0));
      ex.named_sets.emplace("Y_gamma_5", line_at(5.0));
      ex.expectations = {{"halving_coordinate", 0},
                         {"halving_tol", 1e-12},
                         {"k_max", 40},
                         {"gamma_invariance_tol", 1e-14},
                         {"unilateral_verdict", "fails_evidence"},
                         {"finite_termination", false}};
      break;
    }
    case ExampleId::BallHyperplane: {
      Ball ball(vec2(0, 1), 1.0);
      ex.problem.dimension = 2;
      ex.problem.sets = {ball, Hyperplane(vec2(0, 1), -1.0)};
      ex.problem.start = vec2(1, 1);
      ex.problem.method = io::Method::Map;
      ex.problem.stop.max_iter = 500;
      ex.named_sets.emplace("X", ball);
      ex.named_sets.emplace("Y", Hyperplane(vec2(0, 1), -1.0));
      ex.expectations = {{"eps_grid", {0.1, 0.5, 1.0, 2.0}},
                         {"rate_tol", 1e-3},
                         {"sublinear_tail_min", 0.999},
                         {"best_pair_x", {0.0, 0.0}},
                         {"best_pair_y", {0.0, -1.0}},
                         {"finite_termination", false}};
      break;
    }
    case ExampleId::BapebVsTransversality: {
      Matrix q1(1, 1);
      q1 << 2.0;
      Vector z1 = Vector::Zero(1);
      std::vector<ConvexSet> xm;
      xm.push_back(QuadraticEpigraph(q1, z1, 1.0));       // x1^2 + 1 <= x2
      xm.push_back(Halfspace(vec2(-1, -1), -1.0));        // x1 + x2 >= 1
      IntersectionSet X(std::move(xm), vec2(0, 3));
      std::vector<ConvexSet> ym;
      ym.push_back(Halfspace(vec2(1, 1), 0.0));           // y1 + y2 <= 0
      ym.push_back(QuadraticEpigraph(q1, z1, 0.0, -1.0)); // y1^2 + y2 <= 0
      IntersectionSet Y(std::move(ym), vec2(0, -1));
      ex.problem.dimension = 2;
      ex.problem.sets = {X, Y};
      ex.problem.start = vec2(2, 5);
      ex.problem.method = io::Method::Map;
      ex.problem.stop.max_iter = 300;
      ex.named_sets.emplace("X", X);
      ex.named_sets.emplace("Y", Y);
      ex.expectations = {{"best_pair_x", {0.0, 1.0}},
                         {"best_pair_y", {0.0, 0.0}},
                         {"finite_termination", true},
                         {"bilateral_verdict", "holds"},
                         {"transversality_verdict", "fails_evidence"},
                         {"witness_ks", {2, 5, 10, 50, 1000, 100000, 1000000}}};
      break;
    }
    case ExampleId::ProductTransport: {
      Matrix ax(2, 2);
      ax << 1, -1, -1, -1;
      Polyhedron X(ax, vec2(-2, -2));  // x2 >= |x1| + 2
      Matrix ay(2, 2);
      ay << 1, 1, -1, 1;
      Polyhedron Y(ay, vec2(0, 0));    // y2 <= -|y1|
      Hyperplane H(vec2(0, 1), 0.0);
      ex.problem.dimension = 2;
      ex.problem.sets = {Y, X};
      ex.problem.start = vec2(5, 7);
      ex.problem.method = io::Method::Cimmino;
      ex.problem.stop.max_iter = 10000;
      ex.named_sets.emplace("X", X);
      ex.named_sets.emplace("Y", Y);
      ex.named_sets.emplace("H", H);
      ex.expectations = {{"cimmino_yx_final", {0.0, 1.0}},
                         {"cimmino_yx_finite", true},
                         {"cimmino_hx_finite", false},
                         {"cimmino_hx_limit", {0.0, 1.0}},
                         {"map_xh_final", {0.0, 2.0}},
                         {"best_pair_x", {0.0, 2.0}},
                         {"best_pair_y", {0.0, 0.0}},
                         {"unilateral_omega", 0.7071067811865476},
                         {"unilateral_omega_tol", 0.01}};
      break;
    }
    case ExampleId::LpDemo: {
      Matrix A(1, 2);
      A << 1, 1;
      LinearProgram lp(vec2(1, 1), A, Vector::Ones(1), {true, true});
      const double eps = 0.5;
      const Polyhedron region = lp.feasible_region();
      Hyperplane target(vec2(1, 1), 1.0 - eps);
      ex.problem.dimension = 2;
      ex.problem.sets = {region, target};
      ex.problem.start = vec2(2, 0.5);
      ex.problem.method = io::Method::Map;
      ex.problem.stop.max_iter = 200;
      ex.named_sets.emplace("Omega", region);
      ex.named_sets.emplace("H", target);
      ex.expectations = {{"objective", 1.0},
                         {"dual_point", {1.0}},
                         {"eps", eps},
                         {"finite_termination", true}};
      break;
    }
    case ExampleId::MinmaxDemo: {
      Matrix A(2, 2);
      A << 1, -1, -1, -1;
      Polyhedron epi(A, vec2(0, 0));  // epigraph of |x|
      Hyperplane level(vec2(0, 1), -1.0);
      ex.problem.dimension = 2;
      ex.problem.sets = {epi, level};
      ex.problem.start = vec2(0.7, 0.7);
      ex.problem.method = io::Method::Map;
      ex.problem.stop.max_iter = 200;
      ex.named_sets.emplace("epi", epi);
      ex.named_sets.emplace("H_beta", level);
      ex.expectations = {{"minimizer", {0.0}},
                         {"value", 0.0},
                         {"beta", -1.0},
                         {"finite_termination", true},
                         {"quadratic_minimizer", 0.5},
                         {"quadratic_value", 0.25},
                         {"quadratic_tol", 1e-8}};
      break;
    }
    case ExampleId::ParallelLinesCycle: {
      Hyperplane l0(vec2(0, 1), 0.0);
      Hyperplane l1(vec2(0, 1), 1.0);
      Hyperplane l2(vec2(0, 1), 2.0);
      ex.problem.dimension = 2;
      ex.problem.sets = {l0, l1, l2};
      ex.problem.start = vec2(3, 5);
      ex.problem.method = io::Method::Cyclic;
      ex.problem.stop.max_iter = 50;
      ex.named_sets.emplace("L0", l0);
      ex.named_sets.emplace("L1", l1);
      ex.named_sets.emplace("L2", l2);
      ex.expectations = {{"finite_termination", true},
                         {"cycle", {{3.0, 0.0}, {3.0, 1.0}, {3.0, 2.0}}}};
      break;
    }
  }
  return ex;
}

double fit_tail_rate(const IterationTrace& trace, int coord, int window) {
  std::vector<double> ratios;
  const auto& recs = trace.records;
  for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
    const double a = std::abs(recs[i].iterate(coord));
    const double b = std::abs(recs[i + 1].iterate(coord));
    if (a > 1e-300 && b > 1e-300) ratios.push_back(b / a);
  }
  if (ratios.empty()) return std::numeric_limits<double>::quiet_NaN();
  // On short runs the window shrinks to the latter half so the initial
  // transient never enters the fit.
  std::size_t take = std::min<std::size_t>(ratios.size(), static_cast<std::size_t>(window));
  take = std::min(take, std::max<std::size_t>(1, ratios.size() / 2));
  double log_sum = 0.0;
  for (std::size_t i = ratios.size() - take; i < ratios.size(); ++i) log_sum += std::log(ratios[i]);
  return std::exp(log_sum / static_cast<double>(take));
}

std::vector<HolderRateRow> holder_rate_experiment(const std::vector<double>& eps_grid,
                                                  const StopCriteria& stop) {
  std::vector<HolderRateRow> rows;
  rows.reserve(eps_grid.size());
  const Ball X(vec2(0, 1), 1.0);
  for (double eps : eps_grid) {
    if (eps < 0.0 || eps > 10.0) throw Error("eps grid restricted to [0, 10]");
    const Hyperplane line(vec2(0, 1), -eps);
    RunResult run = map_run(line, X, vec2(1, -eps), stop);
    HolderRateRow row;
    row.eps = eps;
    row.rate = fit_tail_rate(run.trace, 0, 50);
    row.iters = run.trace.iterations();
    row.status = run.status;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace altproj::apps
