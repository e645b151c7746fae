#pragma once

#include <Eigen/Core>

#include <optional>
#include <variant>
#include <vector>

#include "altproj/errors.hpp"

namespace altproj {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Tolerance under which a point counts as contained in a set.
inline constexpr double kContainTol = 1e-10;
/// Tolerance on KKT multiplier signs at an active-set exit.
inline constexpr double kMultiplierTol = 1e-10;

class ConvexSet;

/// {x : <normal,x> = offset}, ||normal|| > 0.
struct Hyperplane {
  Vector normal;
  double offset = 0.0;

  Hyperplane(Vector n, double b);
};

/// {x : <normal,x> <= offset}, ||normal|| > 0.
struct Halfspace {
  Vector normal;
  double offset = 0.0;

  Halfspace(Vector n, double b);
};

/// {x : A x <= b}, nonempty with at least one row.
///
/// Projection uses a dense active-set solve; intended for m, n <= 64.
/// The constructor verifies nonemptiness by projecting the origin onto
/// the set, which doubles as the phase-one feasibility check.
struct Polyhedron {
  Matrix A;
  Vector b;

  Polyhedron(Matrix a, Vector rhs);
};

/// Closed Euclidean ball, radius > 0.
struct Ball {
  Vector center;
  double radius = 0.0;

  Ball(Vector c, double r);
};

/// base + span(directions); directions are orthonormalized on construction.
struct AffineSubspace {
  Vector base;
  Matrix directions;  // columns orthonormal after construction

  AffineSubspace(Vector base_point, Matrix dirs);
};

/// {(x,t) : 1/2 <x,Qx> + <q,x> + c <= t_sign * t} with Q symmetric PSD and
/// t the last coordinate. t_sign = -1 realizes downward ("hypograph-like")
/// quadratic constraints such as x1^2 + x2 <= 0 within the same catalog.
/// Q is clamped to PSD: eigenvalues must be >= -1e-10 and negatives are
/// floored to zero.
struct QuadraticEpigraph {
  Matrix quad;
  Vector lin;
  double constant = 0.0;
  double t_sign = 1.0;

  QuadraticEpigraph(Matrix q_matrix, Vector q_vector, double c, double sign_of_t = 1.0);
};

/// Intersection of catalog members (halfspaces, hyperplanes, balls,
/// quadratic epigraphs). A feasibility witness ("Slater point") must be
/// supplied at construction; it is validated to satisfy every member and
/// anchors the KKT enumeration. For full-dimensional sets it should be
/// strictly interior; lower-dimensional intersections (e.g. a set sliced
/// by a hyperplane) are accepted with a boundary witness.
struct IntersectionSet {
  std::vector<ConvexSet> members;
  Vector slater;

  IntersectionSet(std::vector<ConvexSet> member_sets, Vector slater_point);
};

/// X1 x X2 x ... x Xm with every factor of equal dimension n; ambient m*n.
struct ProductSet {
  std::vector<ConvexSet> factors;

  explicit ProductSet(std::vector<ConvexSet> factor_sets);
};

/// {(z,...,z) in R^{m n} : z in R^n}, m >= 2 copies of block dimension n.
struct DiagonalSubspace {
  int copies = 0;
  int block_dim = 0;

  DiagonalSubspace(int m, int n);
};

/// Tagged union over the supported set catalog. Every variant owns an
/// exact Euclidean projection. Immutable after construction; all
/// operations are pure and safe to call concurrently.
class ConvexSet {
 public:
  using Variant = std::variant<Hyperplane, Halfspace, Polyhedron, Ball, AffineSubspace,
                               QuadraticEpigraph, IntersectionSet, ProductSet, DiagonalSubspace>;

  ConvexSet(Hyperplane s) : v_(std::move(s)) {}          // NOLINT(google-explicit-constructor)
  ConvexSet(Halfspace s) : v_(std::move(s)) {}           // NOLINT
  ConvexSet(Polyhedron s) : v_(std::move(s)) {}          // NOLINT
  ConvexSet(Ball s) : v_(std::move(s)) {}                // NOLINT
  ConvexSet(AffineSubspace s) : v_(std::move(s)) {}      // NOLINT
  ConvexSet(QuadraticEpigraph s) : v_(std::move(s)) {}   // NOLINT
  ConvexSet(IntersectionSet s) : v_(std::move(s)) {}     // NOLINT
  ConvexSet(ProductSet s) : v_(std::move(s)) {}          // NOLINT
  ConvexSet(DiagonalSubspace s) : v_(std::move(s)) {}    // NOLINT

  const Variant& variant() const { return v_; }

  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&v_);
  }

  /// Ambient dimension.
  int dimension() const;

  /// Human-readable tag matching the JSON schema ("hyperplane", ...).
  const char* tag() const;

 private:
  Variant v_;
};

/// Exact Euclidean projection of `point` onto `set`.
Vector project(const ConvexSet& set, const Vector& point);

/// Projection onto {x : A x <= b} by a dual active-set solve with a
/// least-index anti-cycling rule. The result is KKT-verified: multipliers
/// >= -1e-10, feasibility and stationarity within tolerance.
Vector project_polyhedron(const Polyhedron& poly, const Vector& point);

/// Projection onto an intersection of catalog members: enumerates active
/// subsets, solves each KKT system by damped Newton (tol 1e-12, at most
/// 100 steps), and returns the candidate with nonnegative multipliers and
/// feasibility. Falls back to Dykstra's algorithm when the enumeration is
/// ambiguous; throws NoKktCandidate when no verified candidate exists.
Vector project_intersection(const IntersectionSet& set, const Vector& point);

/// Reflector 2 P_S - Id.
Vector reflect(const ConvexSet& set, const Vector& point);

/// dist(point, set) = ||point - P_S(point)||.
double distance(const ConvexSet& set, const Vector& point);

/// Membership within `tol` (evaluated through the projection).
bool contains(const ConvexSet& set, const Vector& point, double tol = kContainTol);

/// Distance from `dir` to the normal cone of `set` at `at`, the cone
/// being the nonnegative span of active constraint gradients. `at` must
/// lie on the boundary of the set (within tolerance) or in its interior;
/// at interior points the cone is {0} and the distance of a unit vector
/// is 1 by convention. Supported variants: Polyhedron, Halfspace,
/// Hyperplane, Ball, QuadraticEpigraph, IntersectionSet.
double normal_cone_distance(const ConvexSet& set, const Vector& at, const Vector& dir);

/// Generators of the normal cone at `at` (columns). Hyperplanes contribute
/// both signs of their normal. Empty when no constraint is active.
Matrix normal_cone_generators(const ConvexSet& set, const Vector& at);

/// The set translated by `shift`.
ConvexSet translate(const ConvexSet& set, const Vector& shift);

/// Flattens a set into catalog constraint members (halfspaces,
/// hyperplanes, balls, quadratic epigraphs) suitable for KKT enumeration.
/// Polyhedra become their rows, affine subspaces become hyperplanes.
/// Returns nullopt for variants with no such representation
/// (ProductSet, DiagonalSubspace).
std::optional<std::vector<ConvexSet>> member_constraints(const ConvexSet& set);

/// Projection of `point` onto the intersection of `members` (each a
/// Halfspace, Hyperplane, Ball or QuadraticEpigraph), by the same KKT
/// enumeration as project_intersection but without a Slater witness.
/// `hint` seeds the Dykstra fallback; pass a feasible point when known.
Vector project_onto_members(const std::vector<ConvexSet>& members, const Vector& point,
                            const Vector* hint = nullptr);

/// Distance to the intersection of `members`.
double distance_to_members(const std::vector<ConvexSet>& members, const Vector& point,
                           const Vector* hint = nullptr);

namespace detail {

/// min_{mu >= 0} || G mu - v ||, returns the minimizer; Lawson-Hanson
/// style active-set iteration with a least-index tie rule.
Vector nnls(const Matrix& G, const Vector& v);

}  // namespace detail

}  // namespace altproj
