#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "altproj/io.hpp"
#include "altproj/linear_program.hpp"
#include "altproj/solvers.hpp"

namespace altproj::apps {

/// f(x) = <a,x> + b.
struct AffinePiece {
  Vector a;
  double b = 0.0;
};

/// f(x) = 1/2 <x,Qx> + <q,x> + c, Q symmetric PSD.
struct QuadraticPiece {
  Matrix Q;
  Vector q;
  double c = 0.0;
};

using Piece = std::variant<AffinePiece, QuadraticPiece>;

/// min_x g(x) = max_i f_i(x), attacked through the epigraph of g and the
/// horizontal hyperplane at a strict lower bound beta < g*.
struct MinMaxProblem {
  std::vector<Piece> pieces;
  double beta = 0.0;
};

double evaluate_piece(const Piece& piece, const Vector& x);
double evaluate_max(const MinMaxProblem& p, const Vector& x);

struct LpSolveResult {
  Vector x;
  double value = 0.0;
  RunResult run;
  Vector gap;  // x - P_H(x), a positive multiple of the cost at optimality
};

/// Solves the LP by alternating projections between the feasible region and
/// the hyperplane {x : <c,x> = <b,y_hat> - eps} below the optimal level.
/// dual_point must satisfy A' y <= c, y >= 0 (validated); eps > 0.
LpSolveResult lp_solve_via_map(const LinearProgram& lp, const Vector& dual_point, double eps,
                               const Vector& x0, const StopCriteria& stop);

struct MinMaxResult {
  Vector x;
  double value = 0.0;
  RunResult run;
};

/// Alternating projections between epi(max f_i) and {t = beta}. Affine
/// instances use the polyhedral epigraph; quadratic pieces go through the
/// epigraph intersection. Throws BetaNotBelowOptimum when the run detects a
/// consistent instance (beta >= g*).
MinMaxResult minmax_solve(const MinMaxProblem& p, const Vector& x0, const StopCriteria& stop);

enum class ExampleId {
  ReverseLines,
  BallHyperplane,
  BapebVsTransversality,
  ProductTransport,
  LpDemo,
  MinmaxDemo,
  ParallelLinesCycle,
};

const char* to_string(ExampleId id);
ExampleId parse_example_id(const std::string& name);
std::vector<ExampleId> all_example_ids();

/// A registry entry: the canonical two-or-more-set run plus every named set
/// and the expected outcomes used by the reproduction harness.
struct ExampleProblem {
  io::ProblemSpec problem;
  std::map<std::string, ConvexSet> named_sets;
  nlohmann::json expectations;
};

ExampleProblem build_example(ExampleId id);

struct HolderRateRow {
  double eps = 0.0;
  double rate = 0.0;
  int iters = 0;
  RunStatus status = RunStatus::MaxIterReached;
};

/// Measures the tail contraction ratio of the first coordinate of the
/// ball-vs-line iteration monitored on the line, over a grid of gaps.
/// The measured rate approaches 1/(1+eps); at eps = 0 the tail ratios
/// approach 1 (sublinear decay). Exploratory: no sharper claim is asserted.
std::vector<HolderRateRow> holder_rate_experiment(const std::vector<double>& eps_grid,
                                                  const StopCriteria& stop);

/// Geometric mean of the last `window` ratios |x1^{k+1}| / |x1^k| over the
/// trace, skipping underflowed entries.
double fit_tail_rate(const IterationTrace& trace, int coord, int window = 50);

}  // namespace altproj::apps
