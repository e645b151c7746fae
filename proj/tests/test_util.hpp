#pragma once

#include <vector>

#include "altproj/geometry.hpp"
#include "altproj/random.hpp"

namespace altproj::testutil {

inline Vector vec(std::initializer_list<double> vals) {
  Vector v(static_cast<int>(vals.size()));
  int i = 0;
  for (double x : vals) v(i++) = x;
  return v;
}

inline Matrix mat(int rows, int cols, std::initializer_list<double> vals) {
  Matrix m(rows, cols);
  int i = 0;
  for (double x : vals) {
    m(i / cols, i % cols) = x;
    ++i;
  }
  return m;
}

// The transport polyhedron {x2 >= |x1| + 2}.
inline Polyhedron transport_upper() {
  return Polyhedron(mat(2, 2, {1, -1, -1, -1}), vec({-2, -2}));
}

// The transport polyhedron {y2 <= -|y1|}.
inline Polyhedron transport_lower() {
  return Polyhedron(mat(2, 2, {1, 1, -1, 1}), vec({0, 0}));
}

// The parabola-pair sets with best pair ((0,1), (0,0)).
inline IntersectionSet parabola_upper() {
  std::vector<ConvexSet> members;
  members.push_back(QuadraticEpigraph(mat(1, 1, {2}), Vector::Zero(1), 1.0));
  members.push_back(Halfspace(vec({-1, -1}), -1.0));
  return IntersectionSet(std::move(members), vec({0, 3}));
}

inline IntersectionSet parabola_lower() {
  std::vector<ConvexSet> members;
  members.push_back(Halfspace(vec({1, 1}), 0.0));
  members.push_back(QuadraticEpigraph(mat(1, 1, {2}), Vector::Zero(1), 0.0, -1.0));
  return IntersectionSet(std::move(members), vec({0, -1}));
}

// A nonempty random polyhedron with a feasibility witness inside the
// [-10, 10] box, and a query point.
struct RandomPolyInstance {
  Matrix A;
  Vector b;
  Vector query;
};

inline RandomPolyInstance random_poly_instance(SeededRng& rng, int n, int m) {
  RandomPolyInstance inst;
  inst.A = Matrix(m, n);
  inst.b = Vector(m);
  Vector witness(n);
  for (int j = 0; j < n; ++j) witness(j) = rng.uniform(-3.0, 3.0);
  for (int i = 0; i < m; ++i) {
    Vector a(n);
    for (int j = 0; j < n; ++j) a(j) = rng.uniform(-1.0, 1.0);
    if (a.norm() < 1e-3) a(0) = 1.0;
    a /= a.norm();
    inst.A.row(i) = a.transpose();
    inst.b(i) = a.dot(witness) + rng.uniform(0.1, 2.0);
  }
  inst.query = Vector(n);
  for (int j = 0; j < n; ++j) inst.query(j) = rng.uniform(-6.0, 6.0);
  return inst;
}

}  // namespace altproj::testutil
