#include "altproj/certify.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "altproj/oracle.hpp"
#include "altproj/random.hpp"

namespace altproj::certify {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double scale_of(const Vector& v) { return std::max(1.0, v.lpNorm<Eigen::Infinity>()); }

// Distance to a constraint-represented set, grid fallback in dim <= 3.
std::optional<double> dist_with_fallback(const std::optional<std::vector<ConvexSet>>& members,
                                         const ConvexSet& A, const ConvexSet& B_shifted_ok,
                                         const Vector& shift, const Vector& anchor, const Vector& z) {
  if (members.has_value()) {
    return distance_to_members(*members, z, &anchor);
  }
  if (z.size() > 3) return std::nullopt;
  // Dense grid refinement over membership in both sets.
  ConvexSet B = B_shifted_ok;
  try {
    B = translate(B_shifted_ok, shift);
  } catch (const UnsupportedVariant&) {
    return std::nullopt;
  }
  Vector lo = anchor.array() - 4.0;
  Vector hi = anchor.array() + 4.0;
  bool found = false;
  Vector best;
  double best_d = kInf;
  for (int level = 0; level < 10; ++level) {
    const double h = (hi - lo).lpNorm<Eigen::Infinity>() / 16.0;
    const double eta = 0.75 * h;
    const int res = 17;
    std::vector<int> idx(static_cast<std::size_t>(z.size()), 0);
    Vector pt(z.size());
    for (;;) {
      for (int d = 0; d < z.size(); ++d) {
        pt(d) = lo(d) + (hi(d) - lo(d)) * idx[static_cast<std::size_t>(d)] / (res - 1);
      }
      if (oracle::contains_direct(A, pt, eta) && oracle::contains_direct(B, pt, eta)) {
        const double dd = (pt - z).norm();
        if (!found || dd < best_d) {
          found = true;
          best_d = dd;
          best = pt;
        }
      }
      int d = static_cast<int>(z.size()) - 1;
      while (d >= 0 && ++idx[static_cast<std::size_t>(d)] == res) {
        idx[static_cast<std::size_t>(d)] = 0;
        --d;
      }
      if (d < 0) break;
    }
    if (!found) return std::nullopt;
    const Vector half = 0.125 * (hi - lo);
    lo = best - half;
    hi = best + half;
  }
  return best_d;
}

// Draws a point of S ∩ B_radius(center) by projecting a ball sample onto S.
std::optional<Vector> sample_in_set(const ConvexSet& S, const Vector& center, double radius,
                                    SeededRng& rng) {
  const Vector u = rng.ball_point(center, radius);
  Vector x = project(S, u);
  if ((x - center).norm() <= radius) return x;
  return std::nullopt;
}

bool nonincreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] <= v[i - 1] * 1.25 + 1e-300)) return false;
  }
  return true;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::FailsEvidence: return "fails_evidence";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

BestPairEstimate estimate_from_run(const ConvexSet& X, const ConvexSet& Y, const RunResult& run) {
  if (run.status == RunStatus::Diverged) {
    throw DistanceNotAttained("alternating projections diverged; distance not attained");
  }
  BestPairEstimate est{run.final_iterate, project(Y, run.final_iterate), Vector(), 0.0, false, X, Y};
  est.d = est.x_bar - est.y_bar;
  est.residual = (project(X, est.y_bar) - est.x_bar).norm();
  est.consistent = est.d.norm() <= 1e-10 * scale_of(est.x_bar);
  return est;
}

BestPairEstimate estimate_best_pair(const ConvexSet& X, const ConvexSet& Y, const Vector& x0,
                                    const StopCriteria& stop) {
  return estimate_from_run(X, Y, map_run(X, Y, x0, stop));
}

SupportingHyperplane optimal_supporting_hyperplane(const BestPairEstimate& est) {
  const double gap = est.gap();
  if (gap <= 1e-10 * scale_of(est.x_bar)) {
    throw ConsistentInstance("supporting hyperplane undefined for a consistent instance");
  }
  Vector n = est.d / gap;
  return SupportingHyperplane{Hyperplane(n, n.dot(est.x_bar))};
}

std::optional<std::vector<ConvexSet>> nearest_set_members_x(const BestPairEstimate& est) {
  auto mx = member_constraints(est.X);
  if (!mx) return std::nullopt;
  std::optional<std::vector<ConvexSet>> my;
  try {
    my = member_constraints(translate(est.Y, est.d));
  } catch (const UnsupportedVariant&) {
    return std::nullopt;
  }
  if (!my) return std::nullopt;
  std::vector<ConvexSet> all = *mx;
  all.insert(all.end(), my->begin(), my->end());
  return all;
}

std::optional<std::vector<ConvexSet>> nearest_set_members_y(const BestPairEstimate& est) {
  auto my = member_constraints(est.Y);
  if (!my) return std::nullopt;
  std::optional<std::vector<ConvexSet>> mx;
  try {
    mx = member_constraints(translate(est.X, -est.d));
  } catch (const UnsupportedVariant&) {
    return std::nullopt;
  }
  if (!mx) return std::nullopt;
  std::vector<ConvexSet> all = *my;
  all.insert(all.end(), mx->begin(), mx->end());
  return all;
}

namespace {

// When a strictly convex member is tangent to the supporting hyperplane at
// the best point, the nearest-point set is exactly that singleton: the
// member meets the plane only there, and the KKT machinery (which has no
// multipliers at tangencies) is bypassed.
bool singleton_by_tangency(const std::vector<ConvexSet>& members, const Vector& anchor,
                           const Vector& gap) {
  const double gn = gap.norm();
  if (gn <= 0.0) return false;
  const Vector nhat = gap / gn;
  const double scale = std::max(1.0, anchor.lpNorm<Eigen::Infinity>());

  for (const auto& member : members) {
    if (const auto* ball = member.get_if<Ball>()) {
      const double h = nhat.dot(ball->center - anchor);
      if (std::abs(std::abs(h) - ball->radius) > 1e-8 * std::max(1.0, ball->radius)) continue;
      const Vector touch = ball->center - (h > 0 ? 1.0 : -1.0) * ball->radius * nhat;
      if ((touch - anchor).norm() <= 1e-7 * scale) return true;
    } else if (const auto* quad = member.get_if<QuadraticEpigraph>()) {
      Eigen::SelfAdjointEigenSolver<Matrix> eig(quad->quad);
      if (eig.eigenvalues().minCoeff() <= 1e-10) continue;  // not strictly convex
      const int n = static_cast<int>(quad->lin.size());
      const Vector xs = anchor.head(n);
      const double g = 0.5 * xs.dot(quad->quad * xs) + quad->lin.dot(xs) + quad->constant -
                       quad->t_sign * anchor(n);
      if (std::abs(g) > 1e-7 * scale) continue;  // anchor not on the boundary
      Vector grad(n + 1);
      grad.head(n) = quad->quad * xs + quad->lin;
      grad(n) = -quad->t_sign;
      const Vector ghat = grad / grad.norm();
      if ((ghat - (ghat.dot(nhat)) * nhat).norm() <= 1e-7) return true;
    }
  }
  return false;
}

}  // namespace

std::optional<double> dist_to_nearest_set_x(const BestPairEstimate& est, const Vector& z) {
  auto members = nearest_set_members_x(est);
  if (members && singleton_by_tangency(*members, est.x_bar, est.d)) {
    return (z - est.x_bar).norm();
  }
  return dist_with_fallback(members, est.X, est.Y, est.d, est.x_bar, z);
}

std::optional<double> dist_to_nearest_set_y(const BestPairEstimate& est, const Vector& z) {
  auto members = nearest_set_members_y(est);
  if (members && singleton_by_tangency(*members, est.y_bar, est.d)) {
    return (z - est.y_bar).norm();
  }
  return dist_with_fallback(members, est.Y, est.X, -est.d, est.y_bar, z);
}

ErrorBoundReport unilateral_bapeb_estimate(const ConvexSet& X, const BestPairEstimate& est,
                                           double delta, int n_samples, std::uint64_t rng_seed) {
  if (delta <= 0.0) throw Error("sampling radius must be positive");
  ErrorBoundReport rep;
  rep.delta = delta;

  const SupportingHyperplane hyp = optimal_supporting_hyperplane(est);
  auto members = nearest_set_members_x(est);
  const double scale = scale_of(est.x_bar);

  SeededRng rng(rng_seed);
  std::vector<double> level_min(4, kInf);
  double omega = kInf;
  Vector witness;
  long used = 0;
  bool route_missing = false;

  for (int level = 0; level < 4; ++level) {
    const double radius = delta / std::pow(2.0, level);
    for (int i = 0; i < n_samples; ++i) {
      auto xs = sample_in_set(X, est.x_bar, radius, rng);
      if (!xs) continue;
      auto db = dist_with_fallback(members, est.X, est.Y, est.d, est.x_bar, *xs);
      if (!db) {
        route_missing = true;
        break;
      }
      if (*db <= 1e-9 * scale) continue;  // sample inside the nearest-point set
      const double dh = std::abs(hyp.signed_dist(*xs));
      const double ratio = dh / *db;
      ++used;
      level_min[static_cast<std::size_t>(level)] =
          std::min(level_min[static_cast<std::size_t>(level)], ratio);
      if (ratio < omega) {
        omega = ratio;
        witness = *xs;
      }
    }
    if (route_missing) break;
  }

  rep.samples = used;
  rep.omega = omega;
  rep.min_ratio_witness = witness;

  if (route_missing) {
    rep.verdict = Verdict::Inconclusive;
  } else if (used == 0) {
    rep.verdict = Verdict::Holds;  // vacuous: nothing to bound
    rep.omega = kInf;
  } else if (omega >= kOmegaFloor) {
    rep.verdict = Verdict::Holds;
  } else if (nonincreasing(level_min) && level_min.back() < kOmegaFloor) {
    rep.verdict = Verdict::FailsEvidence;
  } else {
    rep.verdict = Verdict::Inconclusive;
  }
  if (rep.verdict == Verdict::Holds && std::isfinite(rep.omega)) {
    rep.r = std::min(rep.omega * est.gap(), delta / 2.0);
  }
  return rep;
}

ErrorBoundReport bilateral_bapeb_check(const ConvexSet& X, const ConvexSet& Y,
                                       const IterationTrace& trace, const BestPairEstimate& est) {
  (void)X;
  (void)Y;
  if (trace.empty()) throw EmptyTrace("bilateral check needs a nonempty trace");

  const SupportingHyperplane hx = optimal_supporting_hyperplane(est);
  // Supporting hyperplane of Y regarding X: through y_bar, same normal.
  const Vector nrm = est.d / est.gap();
  const Hyperplane hy_plane(nrm, nrm.dot(est.y_bar));

  const double scale = scale_of(est.x_bar);
  const auto& recs = trace.records;

  ErrorBoundReport rep;
  double omega = kInf;
  std::vector<double> finite_ratios;
  Vector witness;
  double max_radius = 0.0;
  bool route_missing = false;
  bool zero_ratio = false;

  for (std::size_t k = 0; k + 1 < recs.size(); ++k) {
    if (k == 0) continue;  // pairs (P_Y(x^k), x^{k+1}) for k >= 1
    const Vector py = recs[k].iterate - recs[k].displacement;  // P_Y(x^k)
    const Vector& xnext = recs[k + 1].iterate;
    max_radius = std::max(max_radius, (recs[k].iterate - est.x_bar).norm());

    auto dby = dist_to_nearest_set_y(est, py);
    auto dbx = dist_to_nearest_set_x(est, xnext);
    if (!dby || !dbx) {
      route_missing = true;
      break;
    }
    double r1 = kInf;
    if (*dby > 1e-9 * scale) r1 = std::abs(hy_plane.normal.dot(py) - hy_plane.offset) / *dby;
    double r2 = kInf;
    if (*dbx > 1e-9 * scale) r2 = std::abs(hx.signed_dist(xnext)) / *dbx;
    const double best = std::max(r1, r2);
    if (!std::isfinite(best)) continue;  // terminal iterate: both at the nearest sets
    finite_ratios.push_back(best);
    if (best < omega) {
      omega = best;
      witness = xnext;
    }
    if (best <= 1e-14) zero_ratio = true;
  }

  rep.samples = static_cast<long>(finite_ratios.size());
  rep.omega = omega;
  rep.delta = max_radius;
  rep.min_ratio_witness = witness;

  if (route_missing) {
    rep.verdict = Verdict::Inconclusive;
    return rep;
  }
  if (finite_ratios.empty()) {
    rep.verdict = Verdict::Holds;  // every tested iterate already terminal
    rep.omega = kInf;
    return rep;
  }
  if (zero_ratio) {
    rep.verdict = Verdict::FailsEvidence;
    return rep;
  }

  // Terminal traces certify the bound; decaying tails falsify it.
  auto terminal_dist = dist_to_nearest_set_x(est, recs.back().iterate);
  const bool terminal = terminal_dist && *terminal_dist <= 1e-8 * scale;
  if (terminal) {
    rep.verdict = omega >= kOmegaFloor ? Verdict::Holds : Verdict::Inconclusive;
  } else {
    const std::size_t tail = std::min<std::size_t>(finite_ratios.size(), 50);
    double decay = 1.0;
    int decay_n = 0;
    for (std::size_t i = finite_ratios.size() - tail + 1; i < finite_ratios.size(); ++i) {
      if (finite_ratios[i - 1] > 0.0) {
        decay *= finite_ratios[i] / finite_ratios[i - 1];
        ++decay_n;
      }
    }
    const double rate = decay_n > 0 ? std::pow(decay, 1.0 / decay_n) : 1.0;
    if (rate <= 0.995 && tail >= 10) {
      rep.verdict = Verdict::FailsEvidence;
    } else if (omega >= kOmegaFloor) {
      rep.verdict = Verdict::Holds;
    } else {
      rep.verdict = Verdict::Inconclusive;
    }
  }
  if (rep.verdict == Verdict::Holds && std::isfinite(rep.omega)) {
    rep.r = std::min(rep.omega * est.gap(), rep.delta / 2.0);
  }
  return rep;
}

double single_step_radius(const ErrorBoundReport& report, const BestPairEstimate& est) {
  if (report.verdict != Verdict::Holds || !std::isfinite(report.omega)) {
    throw InvalidReport("single-step radius requires a Holds report with finite omega");
  }
  return std::min(report.omega * est.gap(), report.delta / 2.0);
}

bool single_step_holds_at(const ConvexSet& X, const ConvexSet& Y, const BestPairEstimate& est,
                          const Vector& z) {
  const Vector w = project(X, project(Y, z));
  auto db = dist_to_nearest_set_x(est, w);
  if (db) return *db <= 1e-8 * scale_of(est.x_bar);
  // Surrogate: containment in X plus distance to the supporting hyperplane.
  const SupportingHyperplane hyp = optimal_supporting_hyperplane(est);
  return contains(X, w, 1e-8) && std::abs(hyp.signed_dist(w)) <= 1e-8 * scale_of(est.x_bar);
}

bool single_step_verify(const ConvexSet& X, const ConvexSet& Y, const BestPairEstimate& est,
                        double r, int n_samples, std::uint64_t rng_seed) {
  if (!(r > 0.0)) throw Error("single-step radius must be positive");
  SeededRng rng(rng_seed);
  for (int i = 0; i < n_samples; ++i) {
    const Vector z = rng.ball_point(est.x_bar, r);
    if (!single_step_holds_at(X, Y, est, z)) return false;
  }
  return true;
}

double linear_regularity_estimate(const ConvexSet& X, const ConvexSet& Y,
                                  const BestPairEstimate& est, double rho, int n_samples,
                                  std::uint64_t rng_seed) {
  if (rho <= 0.0) throw Error("sampling radius must be positive");
  SeededRng rng(rng_seed);
  const ConvexSet y_shifted = translate(Y, est.d);
  const double scale = scale_of(est.x_bar);

  double kappa = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const Vector z = rng.ball_point(est.x_bar, rho);
    const double den = std::max(distance(X, z), distance(y_shifted, z));
    auto num = dist_to_nearest_set_x(est, z);
    if (!num) continue;
    if (den <= 1e-12 * scale) continue;  // z effectively in the nearest set
    kappa = std::max(kappa, *num / den);
  }
  return kappa;
}

double transversality_expression(const ConvexSet& X, const ConvexSet& Y, const Vector& x,
                                 const Vector& y) {
  Vector u = x - y;
  const double nu = u.norm();
  if (nu <= 1e-14) throw Error("transversality expression undefined for coincident points");
  u /= nu;
  const double dy = normal_cone_distance(Y, y, u);
  const double dx = normal_cone_distance(X, x, -u);
  return std::max(dy, dx);
}

WitnessPairs parabola_witness_pairs(const std::vector<int>& ks) {
  WitnessPairs out;
  out.reserve(ks.size());
  for (int k : ks) {
    const double kd = static_cast<double>(k);
    Vector x(2), y(2);
    x << 1.0 / kd, 1.0 / (kd * kd) + 1.0;
    y << -1.0 / kd, -1.0 / (kd * kd);
    out.emplace_back(x, y);
  }
  return out;
}

TransversalityReport intrinsic_transversality_sample(const ConvexSet& X, const ConvexSet& Y,
                                                     const BestPairEstimate& est, double delta,
                                                     int n_samples, std::uint64_t rng_seed,
                                                     const WitnessPairs& witness) {
  if (delta <= 0.0) throw Error("sampling radius must be positive");
  TransversalityReport rep;
  SeededRng rng(rng_seed);
  const double scale = scale_of(est.y_bar);

  double kappa = kInf;
  long used = 0;
  std::vector<double> level_min(4, kInf);

  for (int level = 0; level < 4; ++level) {
    const double radius = delta / std::pow(2.0, level);
    for (int i = 0; i < n_samples; ++i) {
      auto xs = sample_in_set(X, est.x_bar, radius, rng);
      auto ys = sample_in_set(Y, est.y_bar, radius, rng);
      if (!xs || !ys) continue;
      auto dby = dist_to_nearest_set_y(est, *ys);
      if (dby && *dby <= 1e-9 * scale) continue;  // y must avoid the nearest set
      if ((*xs - *ys).norm() <= 1e-12) continue;
      const double e = transversality_expression(X, Y, *xs, *ys);
      ++used;
      level_min[static_cast<std::size_t>(level)] =
          std::min(level_min[static_cast<std::size_t>(level)], e);
      kappa = std::min(kappa, e);
    }
  }

  double witness_min = kInf;
  for (const auto& [wx, wy] : witness) {
    const double e = transversality_expression(X, Y, wx, wy);
    ++used;
    witness_min = std::min(witness_min, e);
    kappa = std::min(kappa, e);
  }

  rep.samples = used;
  rep.kappa = std::isfinite(kappa) ? std::min(kappa, 1.0) : 1.0;

  if (witness_min < kKappaFloor) {
    rep.verdict = Verdict::FailsEvidence;
  } else if (used == 0) {
    rep.verdict = Verdict::Inconclusive;
  } else if (kappa >= kKappaFloor) {
    rep.verdict = Verdict::Holds;
  } else if (nonincreasing(level_min) && level_min.back() < kKappaFloor) {
    rep.verdict = Verdict::FailsEvidence;
  } else {
    rep.verdict = Verdict::Inconclusive;
  }
  return rep;
}

}  // namespace altproj::certify
