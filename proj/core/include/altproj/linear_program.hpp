#pragma once

#include "altproj/geometry.hpp"

namespace altproj {

/// min <c,x>  s.t.  A x >= b  and  x_i >= 0 for flagged i.
struct LinearProgram {
  Vector c;
  Matrix A;
  Vector b;
  std::vector<bool> nonneg;  // one flag per variable

  LinearProgram(Vector cost, Matrix rows, Vector rhs, std::vector<bool> nonneg_flags);

  int num_vars() const { return static_cast<int>(c.size()); }
  int num_rows() const { return static_cast<int>(A.rows()); }

  /// The feasible region as a polyhedron {x : -A x <= -b, -x_i <= 0};
  /// construction doubles as the phase-one nonemptiness check.
  Polyhedron feasible_region() const;
};

}  // namespace altproj
