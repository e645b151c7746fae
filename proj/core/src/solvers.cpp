#include "altproj/solvers.hpp"

#include <cmath>

namespace altproj {

namespace {

// Steps at machine-epsilon scale count as an exact fixed point: generic
// real-valued data cannot freeze bitwise, but its terminal dust cycles sit
// three orders below any fix_tol a linear-rate run can reach before its
// tolerance stop fires.
constexpr double kFiniteRelStep = 1e-15;

double rel_step(const TraceRecord& cur, const Vector& prev_iterate) {
  const double scale = std::max(cur.iterate.norm(), prev_iterate.norm());
  if (scale == 0.0) return 0.0;
  return cur.step_norm / scale;
}

// Classifies the trailing window after each appended record. Returns true
// when the run should stop.
class StopMonitor {
 public:
  StopMonitor(const StopCriteria& stop) : stop_(stop) {}

  void push(double step_norm, double relative) {
    last_zero_ = step_norm == 0.0 || relative <= kFiniteRelStep;
    zero_run_ = last_zero_ ? zero_run_ + 1 : 0;
    tol_run_ = (relative <= stop_.fix_tol) ? tol_run_ + 1 : 0;
  }

  bool finite(int k, int* k_bar) const {
    if (zero_run_ >= stop_.stall_window) {
      *k_bar = k - stop_.stall_window;
      return true;
    }
    return false;
  }

  // A running streak of exact zeros defers to the finite-termination rule.
  bool converged() const { return tol_run_ >= stop_.stall_window && !last_zero_; }

 private:
  StopCriteria stop_;
  int zero_run_ = 0;
  int tol_run_ = 0;
  bool last_zero_ = false;
};

struct DriverState {
  IterationTrace trace;
  StopMonitor monitor;
  RunStatus status = RunStatus::MaxIterReached;
  std::optional<int> finite_k;

  explicit DriverState(const StopCriteria& stop) : monitor(stop) {}
};

// Appends a record and evaluates the stopping rules; returns true to stop.
bool advance(DriverState& st, const StopCriteria& stop, TraceRecord rec, const Vector& prev) {
  const double rel = rec.k == 0 ? 0.0 : rel_step(rec, prev);
  st.trace.records.push_back(std::move(rec));
  const TraceRecord& cur = st.trace.records.back();
  if (cur.k > 0) st.monitor.push(cur.step_norm, rel);

  int k_bar = 0;
  if (cur.k > 0 && st.monitor.finite(cur.k, &k_bar)) {
    st.status = RunStatus::FiniteTermination;
    st.finite_k = k_bar;
    return true;
  }
  if (cur.k > 0 && st.monitor.converged()) {
    st.status = RunStatus::ConvergedToTol;
    return true;
  }
  if (cur.iterate.norm() >= stop.divergence_norm) {
    st.status = RunStatus::Diverged;
    return true;
  }
  if (cur.k >= stop.max_iter) {
    st.status = RunStatus::MaxIterReached;
    return true;
  }
  return false;
}

void require_same_dim(const ConvexSet& X, const ConvexSet& Y) {
  if (X.dimension() != Y.dimension()) {
    throw DimensionMismatch("sets must share one ambient dimension");
  }
}

// Post-hoc classification of a fully recorded trace, first trigger wins.
std::pair<RunStatus, std::optional<int>> classify_trace(const IterationTrace& trace,
                                                        const StopCriteria& stop) {
  const auto& recs = trace.records;
  int zero_run = 0;
  int tol_run = 0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (i > 0) {
      const double scale = std::max(recs[i].iterate.norm(), recs[i - 1].iterate.norm());
      const double rel = scale == 0.0 ? 0.0 : recs[i].step_norm / scale;
      const bool zero = recs[i].step_norm == 0.0 || rel <= kFiniteRelStep;
      zero_run = zero ? zero_run + 1 : 0;
      tol_run = (rel <= stop.fix_tol) ? tol_run + 1 : 0;
      if (zero_run >= stop.stall_window) {
        return {RunStatus::FiniteTermination, recs[i].k - stop.stall_window};
      }
      if (tol_run >= stop.stall_window && !zero) return {RunStatus::ConvergedToTol, std::nullopt};
    }
    if (recs[i].iterate.norm() >= stop.divergence_norm) return {RunStatus::Diverged, std::nullopt};
  }
  return {RunStatus::MaxIterReached, std::nullopt};
}

}  // namespace

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::FiniteTermination: return "finite_termination";
    case RunStatus::ConvergedToTol: return "converged_to_tol";
    case RunStatus::Diverged: return "diverged";
    case RunStatus::MaxIterReached: return "max_iter_reached";
  }
  return "unknown";
}

RunResult map_run(const ConvexSet& X, const ConvexSet& Y, const Vector& x0, const StopCriteria& stop) {
  require_same_dim(X, Y);
  if (x0.size() != X.dimension()) throw DimensionMismatch("start point dimension mismatch");

  DriverState st(stop);
  // The trace lives in X: the start is seeded through P_X, so x^k follows
  // the closed forms of the registry instances for any start point.
  Vector x = project(X, x0);
  Vector y = project(Y, x);
  {
    TraceRecord rec{0, x, distance(X, x), (x - y).norm(), 0.0, x - y};
    if (advance(st, stop, std::move(rec), x)) {
      // Stopped at the start (divergence_norm or max_iter = 0 edge cases).
    }
  }

  while (st.status == RunStatus::MaxIterReached && st.trace.back().k < stop.max_iter) {
    Vector prev = x;
    x = project(X, y);
    y = project(Y, x);
    TraceRecord rec{st.trace.back().k + 1, x, distance(X, x), (x - y).norm(), (x - prev).norm(), x - y};
    if (advance(st, stop, std::move(rec), prev)) break;
  }

  RunResult out;
  out.status = st.status;
  out.finite_k = st.finite_k;
  out.trace = std::move(st.trace);
  out.final_iterate = x;
  if (out.status != RunStatus::Diverged) out.best_pair = std::make_pair(x, y);
  return out;
}

CyclicResult cyclic_run(const std::vector<ConvexSet>& sets, const Vector& x0, const StopCriteria& stop) {
  if (sets.size() < 2) throw Error("cyclic projections require at least two sets");
  for (const auto& s : sets) {
    if (s.dimension() != x0.size()) throw DimensionMismatch("cyclic start dimension mismatch");
  }
  const int m = static_cast<int>(sets.size());

  auto sweep = [&](const Vector& z) -> Vector {
    Vector v = z;
    for (int i = m - 1; i >= 0; --i) v = project(sets[static_cast<std::size_t>(i)], v);
    return v;
  };

  DriverState st(stop);
  Vector x = x0;
  {
    TraceRecord rec{0, x, distance(sets[0], x), distance(sets[1], x), 0.0, x - project(sets[1], x)};
    advance(st, stop, std::move(rec), x);
  }
  while (st.status == RunStatus::MaxIterReached && st.trace.back().k < stop.max_iter) {
    Vector prev = x;
    x = sweep(x);
    TraceRecord rec{st.trace.back().k + 1, x, distance(sets[0], x), distance(sets[1], x),
                    (x - prev).norm(), x - project(sets[1], x)};
    if (advance(st, stop, std::move(rec), prev)) break;
  }

  CyclicResult out;
  out.run.status = st.status;
  out.run.finite_k = st.finite_k;
  out.run.trace = std::move(st.trace);
  out.run.final_iterate = x;

  if (st.status == RunStatus::FiniteTermination || st.status == RunStatus::ConvergedToTol) {
    // Chain projections from the fixed point: y_m = P_{Xm}(y_1), then
    // y_{i} = P_{Xi}(y_{i+1}) down to y_1, which must reproduce x.
    std::vector<Vector> pts(static_cast<std::size_t>(m));
    pts[0] = x;
    Vector v = x;
    for (int i = m - 1; i >= 1; --i) {
      v = (i == m - 1) ? project(sets[static_cast<std::size_t>(i)], pts[0])
                       : project(sets[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(i + 1)]);
      pts[static_cast<std::size_t>(i)] = v;
    }
    bool ok = (project(sets[0], pts[1 % static_cast<std::size_t>(m)]) - pts[0]).norm() <=
              std::max(stop.fix_tol * std::max(1.0, pts[0].norm()), 1e-9);
    for (int i = 1; ok && i < m; ++i) {
      const Vector& next = pts[static_cast<std::size_t>((i + 1) % m)];
      ok = (project(sets[static_cast<std::size_t>(i)], next) - pts[static_cast<std::size_t>(i)]).norm() <=
           std::max(stop.fix_tol * std::max(1.0, pts[0].norm()), 1e-9);
    }
    if (ok) {
      out.cycle = Cycle{std::move(pts)};
      out.run.best_pair = std::make_pair(out.cycle->points[0], out.cycle->points[1]);
    }
  }
  return out;
}

CimminoResult cimmino_run(const std::vector<ConvexSet>& sets, const Vector& x0, const StopCriteria& stop) {
  if (sets.size() < 2) throw Error("simultaneous projections require at least two sets");
  for (const auto& s : sets) {
    if (s.dimension() != x0.size()) throw DimensionMismatch("start dimension mismatch");
  }
  const int m = static_cast<int>(sets.size());

  auto average = [&](const Vector& z) -> Vector {
    Vector sum = Vector::Zero(z.size());
    for (const auto& s : sets) sum += project(s, z);
    return sum / static_cast<double>(m);
  };
  auto map_shadow = [&](const Vector& z) -> Vector {
    return project(sets[0], project(sets[1], project(sets[0], z)));
  };

  DriverState st(stop);
  std::vector<double> shadow_residuals;
  Vector z = x0;
  Vector w_prev = map_shadow(z);
  {
    TraceRecord rec{0, z, distance(sets[0], z), distance(sets[1], z), 0.0, z - project(sets[1], z)};
    advance(st, stop, std::move(rec), z);
  }
  while (st.status == RunStatus::MaxIterReached && st.trace.back().k < stop.max_iter) {
    Vector prev = z;
    z = average(z);
    Vector w = map_shadow(z);
    shadow_residuals.push_back((w - w_prev).norm());
    w_prev = std::move(w);
    TraceRecord rec{st.trace.back().k + 1, z, distance(sets[0], z), distance(sets[1], z),
                    (z - prev).norm(), z - project(sets[1], z)};
    if (advance(st, stop, std::move(rec), prev)) break;
  }

  CimminoResult out;
  out.run.status = st.status;
  out.run.finite_k = st.finite_k;
  out.run.trace = std::move(st.trace);
  out.run.final_iterate = z;
  if (st.status != RunStatus::Diverged) {
    out.run.best_pair = std::make_pair(project(sets[0], z), project(sets[1], z));
  }
  out.shadow_residuals = std::move(shadow_residuals);
  return out;
}

DrResult dr_run(const ConvexSet& X, const ConvexSet& Y, const Vector& z0, const StopCriteria& stop) {
  require_same_dim(X, Y);
  if (z0.size() != X.dimension()) throw DimensionMismatch("start dimension mismatch");

  DriverState gov(stop);
  IterationTrace shadow;

  Vector z = z0;
  Vector s = project(X, z);
  {
    TraceRecord grec{0, z, distance(X, z), distance(Y, z), 0.0, z - project(Y, z)};
    advance(gov, stop, std::move(grec), z);
    shadow.records.push_back(TraceRecord{0, s, 0.0, distance(Y, s), 0.0, s - project(Y, s)});
  }

  while (gov.status == RunStatus::MaxIterReached && gov.trace.back().k < stop.max_iter) {
    Vector zprev = z;
    Vector sprev = s;
    z = 0.5 * (z + reflect(Y, reflect(X, z)));
    s = project(X, z);
    const int k = gov.trace.back().k + 1;
    shadow.records.push_back(
        TraceRecord{k, s, 0.0, distance(Y, s), (s - sprev).norm(), s - project(Y, s)});
    TraceRecord grec{k, z, distance(X, z), distance(Y, z), (z - zprev).norm(), z - project(Y, z)};
    if (advance(gov, stop, std::move(grec), zprev)) break;
  }

  DrResult out;
  out.governing.status = gov.status;
  out.governing.finite_k = gov.finite_k;
  out.governing.trace = std::move(gov.trace);
  out.governing.final_iterate = z;
  out.shadow_status = classify_trace(shadow, stop).first;
  out.shadow = std::move(shadow);
  out.best_pair = std::make_pair(s, project(Y, s));
  out.governing.best_pair = out.best_pair;
  return out;
}

std::pair<ProductSet, DiagonalSubspace> pierra_lift(const std::vector<ConvexSet>& sets) {
  if (sets.size() < 2) throw Error("product-space lift requires at least two sets");
  const int n = sets.front().dimension();
  for (const auto& s : sets) {
    if (s.dimension() != n) throw DimensionMismatch("lifted sets must share one dimension");
  }
  return {ProductSet(sets), DiagonalSubspace(static_cast<int>(sets.size()), n)};
}

Vector diagonal_embed(const Vector& z, int copies) {
  Vector out(z.size() * copies);
  for (int i = 0; i < copies; ++i) out.segment(i * static_cast<int>(z.size()), z.size()) = z;
  return out;
}

Vector displacement_estimate(const IterationTrace& trace) {
  if (trace.empty()) throw EmptyTrace("displacement estimate needs a nonempty trace");
  return trace.back().displacement;
}

std::optional<int> detect_finite_termination(const IterationTrace& trace, const StopCriteria& stop) {
  const auto& recs = trace.records;
  const int window = stop.stall_window;
  int run = 0;
  for (std::size_t i = 1; i < recs.size(); ++i) {
    const double rel = rel_step(recs[i], recs[i - 1].iterate);
    run = (recs[i].step_norm == 0.0 || rel <= kFiniteRelStep) ? run + 1 : 0;
    if (run >= window) return recs[i].k - window;
  }
  return std::nullopt;
}

}  // namespace altproj
