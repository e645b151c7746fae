#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "altproj/geometry.hpp"

namespace altproj {

/// Stopping policy shared by all iteration drivers.
///
/// fix_tol bounds the *relative* step norm ||x^k - x^{k-1}|| /
/// max(||x^k||, ||x^{k-1}||) used for ConvergedToTol. Finite termination is
/// detected separately, as stall_window consecutive exactly-zero steps: the
/// finite-termination instances reach machine-exact fixed points, and
/// exactly-zero steps separate them cleanly from linearly convergent runs.
struct StopCriteria {
  int max_iter = 1000;
  double fix_tol = 1e-12;
  double divergence_norm = 1e8;
  int stall_window = 5;
};

struct TraceRecord {
  int k = 0;
  Vector iterate;
  double dist_to_x = 0.0;
  double dist_to_y = 0.0;
  double step_norm = 0.0;  // ||x^k - x^{k-1}||, 0 at k = 0
  Vector displacement;     // x^k - P_Y(x^k)
};

/// Per-iteration record stream. k is strictly increasing from 0.
struct IterationTrace {
  std::vector<TraceRecord> records;

  bool empty() const { return records.empty(); }
  const TraceRecord& back() const { return records.back(); }
  int iterations() const { return records.empty() ? 0 : records.back().k; }
};

enum class RunStatus { FiniteTermination, ConvergedToTol, Diverged, MaxIterReached };

const char* to_string(RunStatus status);

struct RunResult {
  RunStatus status = RunStatus::MaxIterReached;
  std::optional<int> finite_k;  // set iff status == FiniteTermination
  Vector final_iterate;
  IterationTrace trace;
  std::optional<std::pair<Vector, Vector>> best_pair;
};

/// One point per set, each the projection of the next (cyclically).
struct Cycle {
  std::vector<Vector> points;
};

struct CyclicResult {
  RunResult run;
  std::optional<Cycle> cycle;
};

struct CimminoResult {
  RunResult run;
  /// || W(z^k) - W(z^{k-1}) || with W(z) = P_{X1} P_{X2} (P_{X1}(z));
  /// exposes the intrinsic finite-termination behaviour of the average.
  std::vector<double> shadow_residuals;
};

struct DrResult {
  RunResult governing;       // the sequence z^{k+1} = (z^k + R_Y R_X z^k)/2
  IterationTrace shadow;     // P_X(z^k)
  RunStatus shadow_status = RunStatus::MaxIterReached;
  std::optional<std::pair<Vector, Vector>> best_pair;  // from the shadow limit
};

/// Alternating projections x^{k+1} = P_X P_Y (x^k), recorded from
/// x^0 = P_X(x0) so the whole trace lies in X.
RunResult map_run(const ConvexSet& X, const ConvexSet& Y, const Vector& x0, const StopCriteria& stop);

/// Cyclic projections x^{k+1} = P_{X1} P_{X2} ... P_{Xm} (x^k); on
/// termination the cycle is extracted by chaining projections from the
/// fixed point and verified against its defining relations.
CyclicResult cyclic_run(const std::vector<ConvexSet>& sets, const Vector& x0, const StopCriteria& stop);

/// Simultaneous projections z^{k+1} = (1/m) sum_i P_{Xi}(z^k).
CimminoResult cimmino_run(const std::vector<ConvexSet>& sets, const Vector& x0, const StopCriteria& stop);

/// Douglas-Rachford z^{k+1} = (z^k + R_Y R_X(z^k))/2, reporting the
/// governing sequence and its shadow P_X(z^k) separately; under an empty
/// intersection the governing sequence diverges while the shadow converges.
DrResult dr_run(const ConvexSet& X, const ConvexSet& Y, const Vector& z0, const StopCriteria& stop);

/// Product-space lift: (X1 x ... x Xm, diagonal). One alternating
/// projection step in the lifted pair equals one simultaneous-projection
/// step on the diagonal, exactly.
std::pair<ProductSet, DiagonalSubspace> pierra_lift(const std::vector<ConvexSet>& sets);

/// Embeds z into the diagonal of the m-fold product space.
Vector diagonal_embed(const Vector& z, int copies);

/// Last recorded displacement estimate x^k - P_Y(x^k); its norm
/// approximates dist(X, Y).
Vector displacement_estimate(const IterationTrace& trace);

/// First index k such that the step norms at k+1 .. k+stall_window are all
/// exactly zero, i.e. the iteration reached a machine-exact fixed point.
std::optional<int> detect_finite_termination(const IterationTrace& trace, const StopCriteria& stop);

}  // namespace altproj
