#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "altproj/geometry.hpp"
#include "altproj/solvers.hpp"

namespace altproj::certify {

/// A best approximation pair estimate: x_bar in X nearest to Y, its
/// partner y_bar = P_Y(x_bar), and the gap vector d = x_bar - y_bar whose
/// norm estimates dist(X, Y). Carries copies of the sets so downstream
/// certificates can build representations of the nearest-point sets.
struct BestPairEstimate {
  Vector x_bar;
  Vector y_bar;
  Vector d;
  double residual = 0.0;  // fixed-point residual ||P_X P_Y(x_bar) - x_bar||
  bool consistent = false;
  ConvexSet X;
  ConvexSet Y;

  double gap() const { return d.norm(); }
};

/// The hyperplane through x_bar with normal d/||d||; every point of X lies
/// on its nonnegative side and the nearest-point set of X lies on it.
struct SupportingHyperplane {
  Hyperplane plane;

  /// Signed offset of z from the plane along the outward normal.
  double signed_dist(const Vector& z) const { return plane.normal.dot(z) - plane.offset; }
};

enum class Verdict { Holds, FailsEvidence, Inconclusive };

const char* to_string(Verdict v);

/// Evidence for / against the Lipschitz error bound
///   omega * dist(x, nearest-point set) <= dist(x, supporting hyperplane).
struct ErrorBoundReport {
  double omega = 0.0;     // estimated infimum ratio; +inf when vacuous
  double delta = 0.0;     // sampling radius used
  double r = 0.0;         // single-step radius min(omega*gap, delta/2), Holds only
  long samples = 0;
  Vector min_ratio_witness;  // empty when vacuous
  Verdict verdict = Verdict::Inconclusive;
};

/// Evidence for / against the uniform normal-cone separation condition.
struct TransversalityReport {
  double kappa = 1.0;  // estimated infimum of the max-distance expression, in [0, 1]
  long samples = 0;
  Verdict verdict = Verdict::Inconclusive;
};

using WitnessPairs = std::vector<std::pair<Vector, Vector>>;

/// Runs alternating projections to the stopping criteria and packages the
/// resulting pair estimate. Throws DistanceNotAttained if the run diverged.
BestPairEstimate estimate_best_pair(const ConvexSet& X, const ConvexSet& Y, const Vector& x0,
                                    const StopCriteria& stop);

/// Packages an estimate from an already completed alternating projection
/// run on (X, Y).
BestPairEstimate estimate_from_run(const ConvexSet& X, const ConvexSet& Y, const RunResult& run);

/// Throws ConsistentInstance when the estimated gap is ~0.
SupportingHyperplane optimal_supporting_hyperplane(const BestPairEstimate& est);

/// Constraint representation of the nearest-point set of X (the
/// intersection of X with Y shifted by the gap vector). nullopt when either
/// set has no constraint representation.
std::optional<std::vector<ConvexSet>> nearest_set_members_x(const BestPairEstimate& est);

/// Same for the nearest-point set of Y.
std::optional<std::vector<ConvexSet>> nearest_set_members_y(const BestPairEstimate& est);

/// dist(z, nearest-point set of X); grid fallback in dimension <= 3,
/// nullopt when no evaluation route exists.
std::optional<double> dist_to_nearest_set_x(const BestPairEstimate& est, const Vector& z);
std::optional<double> dist_to_nearest_set_y(const BestPairEstimate& est, const Vector& z);

/// Samples x in B_delta(x_bar) ∩ X (rejection sampling via
/// project-then-perturb) over shrinking radii delta, delta/2, delta/4,
/// delta/8 and estimates the infimum ratio
///   dist(x, supporting hyperplane) / dist(x, nearest-point set).
/// Holds when the estimate stays above the 1e-6 floor; FailsEvidence when
/// shrinking radii drive it below the floor monotonically. Vacuously Holds
/// (omega = +inf) when the sampling region is empty.
ErrorBoundReport unilateral_bapeb_estimate(const ConvexSet& X, const BestPairEstimate& est,
                                           double delta, int n_samples, std::uint64_t rng_seed);

/// Evaluates the two-sided error bound along an alternating projection
/// trace: at each iterate, at least one of the Y-shadow or the next-iterate
/// inequalities must hold. The verdict follows the tail behaviour of the
/// per-iterate ratios (terminal traces hold; geometrically decaying ratios
/// fail).
ErrorBoundReport bilateral_bapeb_check(const ConvexSet& X, const ConvexSet& Y,
                                       const IterationTrace& trace, const BestPairEstimate& est);

/// r = min(omega * gap, delta / 2); requires a Holds report with finite omega.
double single_step_radius(const ErrorBoundReport& report, const BestPairEstimate& est);

/// Checks P_X P_Y(z) lands in the nearest-point set (within 1e-8) for every
/// sampled z in B_r(x_bar).
bool single_step_verify(const ConvexSet& X, const ConvexSet& Y, const BestPairEstimate& est,
                        double r, int n_samples, std::uint64_t rng_seed);

/// Same check for a single caller-chosen point.
bool single_step_holds_at(const ConvexSet& X, const ConvexSet& Y, const BestPairEstimate& est,
                          const Vector& z);

/// Empirical constant for dist(z, nearest set) <= kappa * max(dist(z, X),
/// dist(z, Y + d)) over samples z in B_rho(x_bar).
double linear_regularity_estimate(const ConvexSet& X, const ConvexSet& Y,
                                  const BestPairEstimate& est, double rho, int n_samples,
                                  std::uint64_t rng_seed);

/// Samples pairs (x in X, y in Y away from the nearest set) near the best
/// pair and estimates the infimum of
///   max( dist(u, N_Y(y)), dist(u, -N_X(x)) ),  u = (x-y)/||x-y||.
/// Witness pairs, when given, are evaluated deterministically and can
/// force FailsEvidence below the 1e-4 floor.
TransversalityReport intrinsic_transversality_sample(const ConvexSet& X, const ConvexSet& Y,
                                                     const BestPairEstimate& est, double delta,
                                                     int n_samples, std::uint64_t rng_seed,
                                                     const WitnessPairs& witness = {});

/// The deterministic witness sequence for the parabola-vs-parabola
/// counterexample pair: x^k = (1/k, 1/k^2 + 1), y^k = (-1/k, -1/k^2).
WitnessPairs parabola_witness_pairs(const std::vector<int>& ks);

/// Per-pair value of the transversality expression (exposed for tests).
double transversality_expression(const ConvexSet& X, const ConvexSet& Y, const Vector& x,
                                 const Vector& y);

inline constexpr double kOmegaFloor = 1e-6;
inline constexpr double kKappaFloor = 1e-4;

}  // namespace altproj::certify
