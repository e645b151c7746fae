#pragma once

#include <utility>

#include "altproj/geometry.hpp"
#include "altproj/linear_program.hpp"

namespace altproj::oracle {

/// Box-and-refine search grid. Each refinement level shrinks the box
/// around the incumbent by a factor of 4; the reported point is within
/// box_width * 4^-levels of the exact optimum (resolution permitting,
/// resolution >= 16 sqrt(n) + 1 keeps the incumbent centered).
struct GridSpec {
  Vector lo;
  Vector hi;
  int resolution = 17;
  int refinement_levels = 8;
};

GridSpec make_grid(double lo, double hi, int dim, int resolution = 17, int levels = 8);

/// Conservative error bound of a grid search: box_width / 4^levels.
double grid_error_bound(const GridSpec& grid);

/// Feasible grid point minimizing the distance to `point`, refined
/// refinement_levels times. Membership is evaluated through per-variant
/// closed forms, independent of the projection code paths. Intended for
/// dimension <= 4.
Vector brute_force_projection(const ConvexSet& set, const Vector& point, const GridSpec& grid);

/// Enumerates active subsets of {A x <= b}, solves each equality system
/// and filters by feasibility and multiplier signs. Exact reference for
/// polyhedron projection at small m, n.
Vector enumerate_projection(const Matrix& A, const Vector& b, const Vector& point);

/// Vertex enumeration: solves the LP by checking every vertex (n active
/// constraints); detects unboundedness by scanning recession directions.
/// Requires n <= 8 and at most 20 constraints in total, and a pointed
/// feasible region (guaranteed when every variable is flagged nonnegative).
std::pair<Vector, double> lp_vertex_solve(const LinearProgram& lp);

/// Minimizing pair over the product grid with refinement.
struct BestPairResult {
  Vector x;
  Vector y;
  double dist = 0.0;
};
BestPairResult grid_best_pair(const ConvexSet& X, const ConvexSet& Y, const GridSpec& grid);

/// Closed-form membership within tol (measured as an approximate distance),
/// independent of the projection operators.
bool contains_direct(const ConvexSet& set, const Vector& x, double tol);

}  // namespace altproj::oracle
