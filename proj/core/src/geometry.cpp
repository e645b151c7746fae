#include "altproj/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace altproj {

namespace {

constexpr double kStationTol = 1e-9;
constexpr double kNewtonTol = 1e-12;
constexpr int kNewtonMaxIter = 100;

void require_dim(const ConvexSet& set, const Vector& point) {
  if (set.dimension() != point.size()) {
    throw DimensionMismatch("point dimension " + std::to_string(point.size()) +
                            " does not match set dimension " + std::to_string(set.dimension()));
  }
}

double safe_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.norm(); }

// ---------------------------------------------------------------------------
// Closed-form projections.

Vector project_hyperplane(const Hyperplane& h, const Vector& p) {
  const double shift = (h.normal.dot(p) - h.offset) / h.normal.squaredNorm();
  return p - shift * h.normal;
}

Vector project_halfspace(const Halfspace& h, const Vector& p) {
  const double slack = h.normal.dot(p) - h.offset;
  if (slack <= 0.0) return p;
  return p - (slack / h.normal.squaredNorm()) * h.normal;
}

Vector project_ball(const Ball& b, const Vector& p) {
  Vector delta = p - b.center;
  const double dist = delta.norm();
  if (dist <= b.radius) return p;
  return b.center + (b.radius / dist) * delta;
}

Vector project_affine(const AffineSubspace& s, const Vector& p) {
  if (s.directions.cols() == 0) return s.base;
  return s.base + s.directions * (s.directions.transpose() * (p - s.base));
}

// Block mean replicated over all copies. The accumulation order matches the
// simultaneous-projection solver so the product-space identity is bitwise.
Vector project_diagonal(const DiagonalSubspace& d, const Vector& p) {
  Vector mean = Vector::Zero(d.block_dim);
  for (int i = 0; i < d.copies; ++i) mean += p.segment(i * d.block_dim, d.block_dim);
  mean /= static_cast<double>(d.copies);
  Vector out(p.size());
  for (int i = 0; i < d.copies; ++i) out.segment(i * d.block_dim, d.block_dim) = mean;
  return out;
}

Vector project_product(const ProductSet& s, const Vector& p) {
  const int n = s.factors.front().dimension();
  Vector out(p.size());
  for (std::size_t i = 0; i < s.factors.size(); ++i) {
    out.segment(static_cast<int>(i) * n, n) = project(s.factors[i], p.segment(static_cast<int>(i) * n, n));
  }
  return out;
}

// Projection onto {(x,t) : q(x) <= t} with q(x) = 1/2 x'Qx + c'x + c0.
// For points below the graph the multiplier lam solves
//   q((I + lam Q)^{-1} (x0 - lam c)) - t0 - lam = 0,
// a strictly decreasing function of lam; solved by safeguarded Newton.
Vector project_quad_epi_up(const Matrix& Q, const Vector& q, double c0, const Vector& p) {
  const int n = static_cast<int>(p.size()) - 1;
  const Vector x0 = p.head(n);
  const double t0 = p(n);

  auto qval = [&](const Vector& x) { return 0.5 * x.dot(Q * x) + q.dot(x) + c0; };
  if (qval(x0) <= t0) return p;

  auto x_of = [&](double lam) -> Vector {
    Matrix M = Matrix::Identity(n, n) + lam * Q;
    return M.ldlt().solve(x0 - lam * q);
  };
  auto phi = [&](double lam) { return qval(x_of(lam)) - t0 - lam; };

  double lo = 0.0;
  double hi = 1.0;
  int guard = 0;
  while (phi(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 200) throw Error("quadratic epigraph projection failed to bracket");
  }

  double lam = 0.5 * (lo + hi);
  const double scale = std::max({1.0, std::abs(t0), std::abs(qval(x0))});
  for (int it = 0; it < 120; ++it) {
    const Vector x = x_of(lam);
    const double f = qval(x) - t0 - lam;
    if (f > 0.0) {
      lo = lam;
    } else {
      hi = lam;
    }
    Vector grad = Q * x + q;
    Matrix M = Matrix::Identity(n, n) + lam * Q;
    const double fprime = -grad.dot(M.ldlt().solve(grad)) - 1.0;
    double next = lam - f / fprime;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(f) <= 1e-14 * scale && hi - lo <= 1e-14 * std::max(1.0, lam)) break;
    lam = next;
  }

  Vector out(p.size());
  out.head(n) = x_of(lam);
  out(n) = t0 + lam;
  return out;
}

Vector project_quad_epi(const QuadraticEpigraph& s, const Vector& p) {
  if (s.t_sign > 0.0) return project_quad_epi_up(s.quad, s.lin, s.constant, p);
  Vector flipped = p;
  flipped(p.size() - 1) = -flipped(p.size() - 1);
  Vector out = project_quad_epi_up(s.quad, s.lin, s.constant, flipped);
  out(p.size() - 1) = -out(p.size() - 1);
  return out;
}

// ---------------------------------------------------------------------------
// Dual active-set projection onto {A x <= b}.
//
// Invariant: x = p - A_W' lambda_W with lambda_W >= 0 and the rows of A_W
// independent. Violated constraints are resolved one at a time by primal/dual
// line searches; the dual objective increases strictly, so the iteration is
// finite. Ties break on the least index.

struct ActiveSetResult {
  Vector x;
  std::vector<int> active;
  Vector multipliers;  // aligned with `active`
};

ActiveSetResult project_polytope(const Matrix& A_in, const Vector& b_in, const Vector& p) {
  const int m = static_cast<int>(A_in.rows());
  const int n = static_cast<int>(A_in.cols());

  // Rows are kept exactly as given: integer-valued data then produces
  // machine-exact vertices, which the finite-termination detectors rely on.
  const Matrix& A = A_in;
  const Vector& b = b_in;
  Vector row_norm(m);
  std::vector<bool> skip(m, false);
  for (int i = 0; i < m; ++i) {
    row_norm(i) = A.row(i).norm();
    if (row_norm(i) <= 1e-14) {
      if (b(i) < -1e-12) throw InvalidSet("polyhedron row with zero normal and negative rhs");
      skip[i] = true;
    }
  }

  std::vector<int> active;
  std::vector<double> lambda;
  Vector x = p;

  const double pivot_cap = std::min(std::pow(4.0, m), 1.0e6);
  int pivots = 0;

  for (;;) {
    const double scale = std::max(1.0, x.lpNorm<Eigen::Infinity>());
    // Most violated constraint (by distance) outside the working set,
    // least index on ties.
    int target = -1;
    double worst = 1e-12 * scale;
    for (int i = 0; i < m; ++i) {
      if (skip[i]) continue;
      if (std::find(active.begin(), active.end(), i) != active.end()) continue;
      const double v = (A.row(i).dot(x) - b(i)) / row_norm(i);
      if (v > worst) {
        worst = v;
        target = i;
      }
    }
    if (target < 0) break;

    const Vector a = A.row(target).transpose();
    double lam_new = 0.0;

    for (;;) {
      if (++pivots > pivot_cap) throw DegenerateKkt("active-set pivot guard exceeded");

      Vector mu;
      Vector z = a;
      if (active.size() == 1) {
        // Exact for orthogonal integer rows; keeps vertices machine-exact.
        const Vector a0 = A.row(active[0]).transpose();
        mu = Vector::Constant(1, a.dot(a0) / a0.squaredNorm());
        z = a - mu(0) * a0;
      } else if (!active.empty()) {
        Matrix At(n, active.size());
        for (std::size_t j = 0; j < active.size(); ++j) At.col(j) = A.row(active[j]).transpose();
        const Matrix gram = At.transpose() * At;
        const Vector rhs = At.transpose() * a;
        mu = gram.ldlt().solve(rhs);
        if (!mu.allFinite() ||
            (gram * mu - rhs).lpNorm<Eigen::Infinity>() >
                1e-10 * std::max(1.0, rhs.lpNorm<Eigen::Infinity>())) {
          mu = At.completeOrthogonalDecomposition().solve(a);
        }
        z = a - At * mu;
      }

      const double viol = a.dot(x) - b(target);
      if (viol <= 1e-12 * row_norm(target) * std::max(1.0, x.lpNorm<Eigen::Infinity>())) {
        if (lam_new > 0.0) {
          active.push_back(target);
          lambda.push_back(lam_new);
        }
        break;
      }

      if (z.norm() > 1e-11 * row_norm(target)) {
        const double t_full = viol / a.dot(z);
        double t_part = std::numeric_limits<double>::infinity();
        int drop = -1;
        for (std::size_t j = 0; j < active.size(); ++j) {
          if (mu(j) > 1e-12) {
            const double t = lambda[j] / mu(j);
            if (t < t_part) {
              t_part = t;
              drop = static_cast<int>(j);
            }
          }
        }
        const double t = std::min(t_full, t_part);
        for (std::size_t j = 0; j < active.size(); ++j) lambda[j] -= t * mu(j);
        lam_new += t;
        // Stationarity by construction: x = p - sum lambda_j a_j - lam_new * a.
        x = p;
        for (std::size_t j = 0; j < active.size(); ++j) x -= lambda[j] * A.row(active[j]).transpose();
        x -= lam_new * a;
        if (t_full <= t_part) {
          active.push_back(target);
          lambda.push_back(lam_new);
          break;
        }
        active.erase(active.begin() + drop);
        lambda.erase(lambda.begin() + drop);
      } else {
        double t_part = std::numeric_limits<double>::infinity();
        int drop = -1;
        for (std::size_t j = 0; j < active.size(); ++j) {
          if (mu(j) > 1e-12) {
            const double t = lambda[j] / mu(j);
            if (t < t_part) {
              t_part = t;
              drop = static_cast<int>(j);
            }
          }
        }
        if (drop < 0) throw InvalidSet("polyhedron is empty (dual ray found)");
        for (std::size_t j = 0; j < active.size(); ++j) lambda[j] -= t_part * mu(j);
        lam_new += t_part;
        active.erase(active.begin() + drop);
        lambda.erase(lambda.begin() + drop);
        x = p;
        for (std::size_t j = 0; j < active.size(); ++j) x -= lambda[j] * A.row(active[j]).transpose();
        x -= lam_new * a;
      }
    }
  }

  // Exit verification: multipliers, feasibility, stationarity.
  const double scale = std::max(1.0, std::max(p.lpNorm<Eigen::Infinity>(), x.lpNorm<Eigen::Infinity>()));
  Vector resid = x - p;
  for (std::size_t j = 0; j < active.size(); ++j) {
    if (lambda[j] < -kMultiplierTol) throw DegenerateKkt("negative multiplier at active-set exit");
    resid += lambda[j] * A.row(active[j]).transpose();
  }
  if (resid.lpNorm<Eigen::Infinity>() > kStationTol * scale) {
    throw DegenerateKkt("stationarity violated at active-set exit");
  }
  for (int i = 0; i < m; ++i) {
    if (skip[i]) continue;
    if ((A.row(i).dot(x) - b(i)) / row_norm(i) > kStationTol * scale) {
      throw DegenerateKkt("infeasible point at active-set exit");
    }
  }

  ActiveSetResult out;
  out.x = std::move(x);
  out.active = std::move(active);
  out.multipliers = Eigen::Map<const Vector>(lambda.data(), static_cast<int>(lambda.size()));
  return out;
}

// ---------------------------------------------------------------------------
// Smooth constraint view of intersection members: g(x) <= 0 (or = 0).

struct ConstraintFn {
  enum class Kind { AffineIneq, AffineEq, BallC, QuadC };
  Kind kind = Kind::AffineIneq;
  Vector a;
  double b = 0.0;
  Vector center;
  double r2 = 0.0;
  Matrix Q;
  Vector q;
  double c0 = 0.0;
  double tsign = 1.0;

  bool equality() const { return kind == Kind::AffineEq; }

  double value(const Vector& x) const {
    switch (kind) {
      case Kind::AffineIneq:
      case Kind::AffineEq:
        return a.dot(x) - b;
      case Kind::BallC:
        return (x - center).squaredNorm() - r2;
      case Kind::QuadC: {
        const int n = static_cast<int>(x.size()) - 1;
        const Vector xs = x.head(n);
        return 0.5 * xs.dot(Q * xs) + q.dot(xs) + c0 - tsign * x(n);
      }
    }
    return 0.0;
  }

  Vector gradient(const Vector& x) const {
    switch (kind) {
      case Kind::AffineIneq:
      case Kind::AffineEq:
        return a;
      case Kind::BallC:
        return 2.0 * (x - center);
      case Kind::QuadC: {
        const int n = static_cast<int>(x.size()) - 1;
        Vector g(x.size());
        g.head(n) = Q * x.head(n) + q;
        g(n) = -tsign;
        return g;
      }
    }
    return Vector::Zero(x.size());
  }

  void add_hessian(double lam, Matrix& H) const {
    if (kind == Kind::BallC) {
      H.diagonal().array() += 2.0 * lam;
    } else if (kind == Kind::QuadC) {
      const int n = static_cast<int>(H.rows()) - 1;
      H.topLeftCorner(n, n) += lam * Q;
    }
  }
};

ConstraintFn to_constraint(const ConvexSet& member) {
  ConstraintFn f;
  if (const auto* h = member.get_if<Halfspace>()) {
    f.kind = ConstraintFn::Kind::AffineIneq;
    const double nrm = h->normal.norm();
    f.a = h->normal / nrm;
    f.b = h->offset / nrm;
  } else if (const auto* h = member.get_if<Hyperplane>()) {
    f.kind = ConstraintFn::Kind::AffineEq;
    const double nrm = h->normal.norm();
    f.a = h->normal / nrm;
    f.b = h->offset / nrm;
  } else if (const auto* ball = member.get_if<Ball>()) {
    f.kind = ConstraintFn::Kind::BallC;
    f.center = ball->center;
    f.r2 = ball->radius * ball->radius;
  } else if (const auto* quad = member.get_if<QuadraticEpigraph>()) {
    f.kind = ConstraintFn::Kind::QuadC;
    f.Q = quad->quad;
    f.q = quad->lin;
    f.c0 = quad->constant;
    f.tsign = quad->t_sign;
  } else {
    throw UnsupportedVariant("intersection members must be halfspace, hyperplane, ball or quadratic epigraph");
  }
  return f;
}

// Damped Newton on the KKT system of min 1/2||x-p||^2 s.t. g_S(x) = 0.
// Polishes past the tolerance while the residual keeps dropping, so corner
// solutions land on machine-exact fixed points.
struct KktSolution {
  Vector x;
  Vector lambda;
  bool converged = false;
};

KktSolution solve_kkt(const std::vector<ConstraintFn>& cons, const std::vector<int>& act,
                      const Vector& p, const Vector& start) {
  const int n = static_cast<int>(p.size());
  const int k = static_cast<int>(act.size());
  Vector x = start;
  Vector lam = Vector::Zero(k);

  auto residual = [&](const Vector& xx, const Vector& ll) -> Vector {
    Vector F(n + k);
    Vector fx = xx - p;
    for (int j = 0; j < k; ++j) fx += ll(j) * cons[act[j]].gradient(xx);
    F.head(n) = fx;
    for (int j = 0; j < k; ++j) F(n + j) = cons[act[j]].value(xx);
    return F;
  };

  const double scale = std::max(1.0, p.lpNorm<Eigen::Infinity>());
  Vector F = residual(x, lam);
  double fnorm = F.lpNorm<Eigen::Infinity>();

  for (int it = 0; it < kNewtonMaxIter; ++it) {
    if (fnorm == 0.0) break;
    Matrix J = Matrix::Zero(n + k, n + k);
    Matrix H = Matrix::Identity(n, n);
    for (int j = 0; j < k; ++j) cons[act[j]].add_hessian(lam(j), H);
    J.topLeftCorner(n, n) = H;
    for (int j = 0; j < k; ++j) {
      Vector g = cons[act[j]].gradient(x);
      J.block(0, n + j, n, 1) = g;
      J.block(n + j, 0, 1, n) = g.transpose();
    }
    Vector step = J.completeOrthogonalDecomposition().solve(-F);

    double eta = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 8; ++bt) {
      Vector xn = x + eta * step.head(n);
      Vector ln = lam + eta * step.tail(k);
      Vector Fn = residual(xn, ln);
      const double fn = Fn.lpNorm<Eigen::Infinity>();
      if (fn < fnorm) {
        x = std::move(xn);
        lam = std::move(ln);
        F = std::move(Fn);
        fnorm = fn;
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) break;
  }

  KktSolution out;
  out.converged = fnorm <= kNewtonTol * scale;
  out.x = std::move(x);
  out.lambda = std::move(lam);
  return out;
}

bool feasible_wrt(const std::vector<ConstraintFn>& cons, const Vector& x, double tol) {
  for (const auto& c : cons) {
    const double g = c.value(x);
    if (c.equality() ? std::abs(g) > tol : g > tol) return false;
  }
  return true;
}

Vector project_member(const ConstraintFn& c, const Vector& p) {
  switch (c.kind) {
    case ConstraintFn::Kind::AffineEq:
      return p - (c.a.dot(p) - c.b) * c.a;
    case ConstraintFn::Kind::AffineIneq: {
      const double s = c.a.dot(p) - c.b;
      return s <= 0.0 ? p : Vector(p - s * c.a);
    }
    case ConstraintFn::Kind::BallC: {
      const double r = std::sqrt(c.r2);
      Vector d = p - c.center;
      const double nd = d.norm();
      return nd <= r ? p : Vector(c.center + (r / nd) * d);
    }
    case ConstraintFn::Kind::QuadC: {
      if (c.tsign > 0.0) return project_quad_epi_up(c.Q, c.q, c.c0, p);
      Vector flipped = p;
      flipped(p.size() - 1) = -flipped(p.size() - 1);
      Vector out = project_quad_epi_up(c.Q, c.q, c.c0, flipped);
      out(p.size() - 1) = -out(p.size() - 1);
      return out;
    }
  }
  return p;
}

// Dykstra's alternating projection scheme; used only as a fallback
// cross-check when the KKT enumeration is ambiguous.
Vector dykstra(const std::vector<ConstraintFn>& cons, const Vector& p, int max_sweeps) {
  const int k = static_cast<int>(cons.size());
  Vector x = p;
  std::vector<Vector> corr(k, Vector::Zero(p.size()));
  const double scale = std::max(1.0, p.lpNorm<Eigen::Infinity>());
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double moved = 0.0;
    for (int i = 0; i < k; ++i) {
      Vector y = x + corr[i];
      Vector xn = project_member(cons[i], y);
      corr[i] = y - xn;
      moved = std::max(moved, (xn - x).lpNorm<Eigen::Infinity>());
      x = std::move(xn);
    }
    if (moved <= 1e-15 * scale) break;
  }
  return x;
}

Vector project_members_impl(const std::vector<ConstraintFn>& cons, const Vector& p, const Vector* hint) {
  const int n = static_cast<int>(p.size());
  const double scale = std::max(1.0, p.lpNorm<Eigen::Infinity>());
  const double tol_feas = kContainTol * scale;

  std::vector<int> eqs;
  std::vector<int> ineqs;
  for (int i = 0; i < static_cast<int>(cons.size()); ++i) {
    (cons[i].equality() ? eqs : ineqs).push_back(i);
  }

  if (feasible_wrt(cons, p, tol_feas) && eqs.empty()) return p;

  const int ni = static_cast<int>(ineqs.size());
  if (ni > 20) throw UnsupportedVariant("too many inequality members for KKT enumeration");

  bool found = false;
  Vector best;
  double best_dist = std::numeric_limits<double>::infinity();

  for (unsigned mask = 0; mask < (1u << ni); ++mask) {
    std::vector<int> act = eqs;
    for (int j = 0; j < ni; ++j) {
      if (mask & (1u << j)) act.push_back(ineqs[j]);
    }
    if (act.empty()) {
      if (feasible_wrt(cons, p, tol_feas)) {
        found = true;
        best = p;
        best_dist = 0.0;
      }
      continue;
    }

    KktSolution sol = solve_kkt(cons, act, p, p);
    if (!sol.converged && hint != nullptr) sol = solve_kkt(cons, act, p, *hint);
    if (!sol.converged) continue;

    bool valid = true;
    for (std::size_t j = 0; j < act.size(); ++j) {
      if (!cons[act[j]].equality() && sol.lambda(static_cast<int>(j)) < -kMultiplierTol) {
        valid = false;
        break;
      }
    }
    if (valid) {
      for (int i = 0; i < static_cast<int>(cons.size()); ++i) {
        if (std::find(act.begin(), act.end(), i) != act.end()) continue;
        if (cons[i].equality() ? std::abs(cons[i].value(sol.x)) > tol_feas
                               : cons[i].value(sol.x) > tol_feas) {
          valid = false;
          break;
        }
      }
    }
    if (!valid) continue;

    const double d = (sol.x - p).norm();
    if (d < best_dist - 1e-15) {
      best_dist = d;
      best = sol.x;
      found = true;
    }
  }

  if (found) return best;

  // Enumeration ambiguous: Dykstra fallback, then re-certify via a warm
  // Newton solve on the active set it suggests.
  Vector y = dykstra(cons, p, 20000);
  if (hint != nullptr && !feasible_wrt(cons, y, 1e-7 * scale)) {
    y = dykstra(cons, *hint + (p - *hint) * 0.0, 20000);
  }
  std::vector<int> act;
  for (int i = 0; i < static_cast<int>(cons.size()); ++i) {
    if (cons[i].equality() || std::abs(cons[i].value(y)) <= 1e-6 * scale) act.push_back(i);
  }
  if (!act.empty()) {
    KktSolution sol = solve_kkt(cons, act, p, y);
    if (sol.converged) {
      bool valid = true;
      for (std::size_t j = 0; j < act.size(); ++j) {
        if (!cons[act[j]].equality() && sol.lambda(static_cast<int>(j)) < -kMultiplierTol) valid = false;
      }
      if (valid && feasible_wrt(cons, sol.x, tol_feas)) return sol.x;
    }
  }
  if (feasible_wrt(cons, y, tol_feas)) return y;

  throw NoKktCandidate("no valid KKT candidate for intersection projection (dimension " +
                       std::to_string(n) + ")");
}

std::vector<ConstraintFn> to_constraints(const std::vector<ConvexSet>& members) {
  std::vector<ConstraintFn> cons;
  cons.reserve(members.size());
  for (const auto& member : members) cons.push_back(to_constraint(member));
  // Near-duplicate affine members destabilize nothing (the Newton solve is
  // rank-tolerant) but dropping them keeps subsets small.
  std::vector<ConstraintFn> unique;
  for (auto& c : cons) {
    bool dup = false;
    for (const auto& u : unique) {
      if (u.kind == c.kind && u.kind != ConstraintFn::Kind::BallC &&
          u.kind != ConstraintFn::Kind::QuadC && u.a.size() == c.a.size() &&
          (u.a - c.a).lpNorm<Eigen::Infinity>() <= 1e-13 && std::abs(u.b - c.b) <= 1e-13) {
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(std::move(c));
  }
  return unique;
}

}  // namespace

// ---------------------------------------------------------------------------
// Constructors.

Hyperplane::Hyperplane(Vector n, double b) : normal(std::move(n)), offset(b) {
  if (normal.size() == 0 || normal.norm() <= 0.0 || !normal.allFinite()) {
    throw InvalidSet("hyperplane requires a nonzero finite normal");
  }
}

Halfspace::Halfspace(Vector n, double b) : normal(std::move(n)), offset(b) {
  if (normal.size() == 0 || normal.norm() <= 0.0 || !normal.allFinite()) {
    throw InvalidSet("halfspace requires a nonzero finite normal");
  }
}

Polyhedron::Polyhedron(Matrix a, Vector rhs) : A(std::move(a)), b(std::move(rhs)) {
  if (A.rows() < 1 || A.rows() != b.size()) throw InvalidSet("polyhedron requires m >= 1 rows with matching rhs");
  if (!A.allFinite() || !b.allFinite()) throw InvalidSet("polyhedron data must be finite");
  // Phase one: projecting the origin certifies nonemptiness.
  project_polytope(A, b, Vector::Zero(A.cols()));
}

Ball::Ball(Vector c, double r) : center(std::move(c)), radius(r) {
  if (!(radius > 0.0) || !center.allFinite()) throw InvalidSet("ball requires radius > 0");
}

AffineSubspace::AffineSubspace(Vector base_point, Matrix dirs) : base(std::move(base_point)) {
  if (!base.allFinite() || !dirs.allFinite()) throw InvalidSet("affine subspace data must be finite");
  if (dirs.rows() != base.size()) throw DimensionMismatch("affine directions must match base dimension");
  if (dirs.cols() == 0) {
    directions = Matrix(base.size(), 0);
    return;
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(dirs);
  qr.setThreshold(1e-12);
  const int rank = static_cast<int>(qr.rank());
  Matrix Qfull = qr.householderQ() * Matrix::Identity(dirs.rows(), rank);
  directions = Qfull;
}

QuadraticEpigraph::QuadraticEpigraph(Matrix q_matrix, Vector q_vector, double c, double sign_of_t)
    : quad(std::move(q_matrix)), lin(std::move(q_vector)), constant(c), t_sign(sign_of_t) {
  if (quad.rows() != quad.cols() || quad.rows() != lin.size()) {
    throw DimensionMismatch("quadratic epigraph requires square Q matching q");
  }
  if (std::abs(std::abs(t_sign) - 1.0) > 0.0) throw InvalidSet("t_sign must be +1 or -1");
  Matrix sym = 0.5 * (quad + quad.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.eigenvalues().minCoeff() < -1e-10) {
    throw InvalidSet("quadratic epigraph requires a positive semidefinite Q");
  }
  Vector clamped = eig.eigenvalues().cwiseMax(0.0);
  quad = eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose();
}

IntersectionSet::IntersectionSet(std::vector<ConvexSet> member_sets, Vector slater_point)
    : members(std::move(member_sets)), slater(std::move(slater_point)) {
  if (members.empty()) throw InvalidSet("intersection requires at least one member");
  for (const auto& member : members) {
    if (member.dimension() != slater.size()) {
      throw DimensionMismatch("intersection members must share the witness dimension");
    }
    const bool ok = member.get_if<Halfspace>() || member.get_if<Hyperplane>() ||
                    member.get_if<Ball>() || member.get_if<QuadraticEpigraph>();
    if (!ok) throw UnsupportedVariant("intersection members restricted to halfspace/hyperplane/ball/quadratic epigraph");
  }
  const auto cons = to_constraints(members);
  const double scale = std::max(1.0, slater.lpNorm<Eigen::Infinity>());
  if (!feasible_wrt(cons, slater, 1e-9 * scale)) {
    throw InvalidSet("intersection witness point violates a member constraint");
  }
}

ProductSet::ProductSet(std::vector<ConvexSet> factor_sets) : factors(std::move(factor_sets)) {
  if (factors.empty()) throw InvalidSet("product requires at least one factor");
  const int n = factors.front().dimension();
  for (const auto& f : factors) {
    if (f.dimension() != n) throw DimensionMismatch("product factors must share one dimension");
  }
}

DiagonalSubspace::DiagonalSubspace(int m, int n) : copies(m), block_dim(n) {
  if (m < 2 || n < 1) throw InvalidSet("diagonal subspace requires m >= 2 copies of dimension >= 1");
}

int ConvexSet::dimension() const {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Hyperplane> || std::is_same_v<T, Halfspace>) {
          return static_cast<int>(s.normal.size());
        } else if constexpr (std::is_same_v<T, Polyhedron>) {
          return static_cast<int>(s.A.cols());
        } else if constexpr (std::is_same_v<T, Ball>) {
          return static_cast<int>(s.center.size());
        } else if constexpr (std::is_same_v<T, AffineSubspace>) {
          return static_cast<int>(s.base.size());
        } else if constexpr (std::is_same_v<T, QuadraticEpigraph>) {
          return static_cast<int>(s.lin.size()) + 1;
        } else if constexpr (std::is_same_v<T, IntersectionSet>) {
          return static_cast<int>(s.slater.size());
        } else if constexpr (std::is_same_v<T, ProductSet>) {
          return s.factors.front().dimension() * static_cast<int>(s.factors.size());
        } else {
          return s.copies * s.block_dim;
        }
      },
      v_);
}

const char* ConvexSet::tag() const {
  return std::visit(
      [](const auto& s) -> const char* {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Hyperplane>) return "hyperplane";
        if constexpr (std::is_same_v<T, Halfspace>) return "halfspace";
        if constexpr (std::is_same_v<T, Polyhedron>) return "polyhedron";
        if constexpr (std::is_same_v<T, Ball>) return "ball";
        if constexpr (std::is_same_v<T, AffineSubspace>) return "affine";
        if constexpr (std::is_same_v<T, QuadraticEpigraph>) return "quad_epigraph";
        if constexpr (std::is_same_v<T, IntersectionSet>) return "intersection";
        if constexpr (std::is_same_v<T, ProductSet>) return "product";
        return "diagonal";
      },
      v_);
}

// ---------------------------------------------------------------------------
// Operations.

Vector project(const ConvexSet& set, const Vector& point) {
  require_dim(set, point);
  return std::visit(
      [&](const auto& s) -> Vector {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Hyperplane>) return project_hyperplane(s, point);
        else if constexpr (std::is_same_v<T, Halfspace>) return project_halfspace(s, point);
        else if constexpr (std::is_same_v<T, Polyhedron>) return project_polyhedron(s, point);
        else if constexpr (std::is_same_v<T, Ball>) return project_ball(s, point);
        else if constexpr (std::is_same_v<T, AffineSubspace>) return project_affine(s, point);
        else if constexpr (std::is_same_v<T, QuadraticEpigraph>) return project_quad_epi(s, point);
        else if constexpr (std::is_same_v<T, IntersectionSet>) return project_intersection(s, point);
        else if constexpr (std::is_same_v<T, ProductSet>) return project_product(s, point);
        else return project_diagonal(s, point);
      },
      set.variant());
}

Vector project_polyhedron(const Polyhedron& poly, const Vector& point) {
  if (poly.A.cols() != point.size()) throw DimensionMismatch("polyhedron projection dimension mismatch");
  return project_polytope(poly.A, poly.b, point).x;
}

Vector project_intersection(const IntersectionSet& set, const Vector& point) {
  if (set.slater.size() != point.size()) throw DimensionMismatch("intersection projection dimension mismatch");
  return project_members_impl(to_constraints(set.members), point, &set.slater);
}

Vector project_onto_members(const std::vector<ConvexSet>& members, const Vector& point, const Vector* hint) {
  return project_members_impl(to_constraints(members), point, hint);
}

double distance_to_members(const std::vector<ConvexSet>& members, const Vector& point, const Vector* hint) {
  return (point - project_onto_members(members, point, hint)).norm();
}

Vector reflect(const ConvexSet& set, const Vector& point) {
  return 2.0 * project(set, point) - point;
}

double distance(const ConvexSet& set, const Vector& point) {
  return (point - project(set, point)).norm();
}

bool contains(const ConvexSet& set, const Vector& point, double tol) {
  return distance(set, point) <= tol;
}

Matrix normal_cone_generators(const ConvexSet& set, const Vector& at) {
  require_dim(set, at);
  const double scale = std::max(1.0, at.lpNorm<Eigen::Infinity>());
  const double tol_act = 1e-8 * scale;

  std::vector<Vector> gens;
  auto add = [&](Vector g) {
    const double nrm = g.norm();
    if (nrm > 0.0) gens.push_back(g / nrm);
  };

  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Halfspace>) {
          if (std::abs(s.normal.dot(at) - s.offset) / s.normal.norm() <= tol_act) add(s.normal);
        } else if constexpr (std::is_same_v<T, Hyperplane>) {
          add(s.normal);
          add(-s.normal);
        } else if constexpr (std::is_same_v<T, Polyhedron>) {
          for (int i = 0; i < s.A.rows(); ++i) {
            const double nrm = s.A.row(i).norm();
            if (nrm <= 1e-14) continue;
            if (std::abs(s.A.row(i).dot(at) - s.b(i)) / nrm <= tol_act) add(s.A.row(i).transpose());
          }
        } else if constexpr (std::is_same_v<T, Ball>) {
          if (std::abs((at - s.center).norm() - s.radius) <= tol_act) add(at - s.center);
        } else if constexpr (std::is_same_v<T, QuadraticEpigraph>) {
          ConstraintFn c = to_constraint(set);
          if (std::abs(c.value(at)) <= tol_act * std::max(1.0, scale)) add(c.gradient(at));
        } else if constexpr (std::is_same_v<T, IntersectionSet>) {
          for (const auto& member : s.members) {
            ConstraintFn c = to_constraint(member);
            if (std::abs(c.value(at)) <= tol_act * std::max(1.0, scale)) {
              add(c.gradient(at));
              if (c.equality()) add(-c.gradient(at));
            }
          }
        } else {
          throw UnsupportedVariant(std::string("normal cone unsupported for variant ") + set.tag());
        }
      },
      set.variant());

  Matrix G(at.size(), static_cast<int>(gens.size()));
  for (int j = 0; j < G.cols(); ++j) G.col(j) = gens[static_cast<std::size_t>(j)];
  return G;
}

double normal_cone_distance(const ConvexSet& set, const Vector& at, const Vector& dir) {
  if (!contains(set, at, 1e-7 * std::max(1.0, at.lpNorm<Eigen::Infinity>()))) {
    throw Error("normal_cone_distance: point does not lie in the set");
  }
  Matrix G = normal_cone_generators(set, at);
  if (G.cols() == 0) return safe_norm(dir);  // interior: cone is {0}
  Vector mu = detail::nnls(G, dir);
  return (dir - G * mu).norm();
}

ConvexSet translate(const ConvexSet& set, const Vector& shift) {
  require_dim(set, shift);
  return std::visit(
      [&](const auto& s) -> ConvexSet {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Hyperplane>) {
          return Hyperplane(s.normal, s.offset + s.normal.dot(shift));
        } else if constexpr (std::is_same_v<T, Halfspace>) {
          return Halfspace(s.normal, s.offset + s.normal.dot(shift));
        } else if constexpr (std::is_same_v<T, Polyhedron>) {
          return Polyhedron(s.A, s.b + s.A * shift);
        } else if constexpr (std::is_same_v<T, Ball>) {
          return Ball(s.center + shift, s.radius);
        } else if constexpr (std::is_same_v<T, AffineSubspace>) {
          AffineSubspace moved = s;
          moved.base += shift;
          return moved;
        } else if constexpr (std::is_same_v<T, QuadraticEpigraph>) {
          const int n = static_cast<int>(s.lin.size());
          const Vector dx = shift.head(n);
          const double dt = shift(n);
          QuadraticEpigraph moved = s;
          moved.lin = s.lin - s.quad * dx;
          moved.constant = s.constant + 0.5 * dx.dot(s.quad * dx) - s.lin.dot(dx) + s.t_sign * dt;
          return moved;
        } else if constexpr (std::is_same_v<T, IntersectionSet>) {
          std::vector<ConvexSet> moved;
          moved.reserve(s.members.size());
          for (const auto& member : s.members) moved.push_back(translate(member, shift));
          return IntersectionSet(std::move(moved), s.slater + shift);
        } else if constexpr (std::is_same_v<T, ProductSet>) {
          const int n = s.factors.front().dimension();
          std::vector<ConvexSet> moved;
          moved.reserve(s.factors.size());
          for (std::size_t i = 0; i < s.factors.size(); ++i) {
            moved.push_back(translate(s.factors[i], shift.segment(static_cast<int>(i) * n, n)));
          }
          return ProductSet(std::move(moved));
        } else {
          // The diagonal subspace is invariant under diagonal shifts only.
          for (int i = 1; i < s.copies; ++i) {
            if ((shift.segment(i * s.block_dim, s.block_dim) - shift.head(s.block_dim))
                    .template lpNorm<Eigen::Infinity>() > 1e-12) {
              throw UnsupportedVariant("diagonal subspace can only be shifted along the diagonal");
            }
          }
          return s;
        }
      },
      set.variant());
}

std::optional<std::vector<ConvexSet>> member_constraints(const ConvexSet& set) {
  return std::visit(
      [&](const auto& s) -> std::optional<std::vector<ConvexSet>> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Hyperplane> || std::is_same_v<T, Halfspace> ||
                      std::is_same_v<T, Ball> || std::is_same_v<T, QuadraticEpigraph>) {
          return std::vector<ConvexSet>{set};
        } else if constexpr (std::is_same_v<T, Polyhedron>) {
          std::vector<ConvexSet> rows;
          rows.reserve(static_cast<std::size_t>(s.A.rows()));
          for (int i = 0; i < s.A.rows(); ++i) {
            if (s.A.row(i).norm() <= 1e-14) continue;
            rows.push_back(Halfspace(s.A.row(i).transpose(), s.b(i)));
          }
          return rows;
        } else if constexpr (std::is_same_v<T, AffineSubspace>) {
          const int n = static_cast<int>(s.base.size());
          const int k = static_cast<int>(s.directions.cols());
          std::vector<ConvexSet> planes;
          if (k == n) return planes;
          Matrix Qfull;
          if (k == 0) {
            Qfull = Matrix::Identity(n, n);
          } else {
            Eigen::HouseholderQR<Matrix> qr(s.directions);
            Qfull = qr.householderQ() * Matrix::Identity(n, n);
          }
          for (int j = k; j < n; ++j) {
            const Vector w = Qfull.col(j);
            planes.push_back(Hyperplane(w, w.dot(s.base)));
          }
          return planes;
        } else if constexpr (std::is_same_v<T, IntersectionSet>) {
          return s.members;
        } else {
          return std::nullopt;
        }
      },
      set.variant());
}

namespace detail {

Vector nnls(const Matrix& G, const Vector& v) {
  const int g = static_cast<int>(G.cols());
  Vector mu = Vector::Zero(g);
  if (g == 0) return mu;

  std::vector<bool> passive(g, false);
  const double scale = std::max(1.0, v.lpNorm<Eigen::Infinity>());
  const int outer_cap = 3 * g + 30;

  for (int outer = 0; outer < outer_cap; ++outer) {
    Vector w = G.transpose() * (v - G * mu);
    int add = -1;
    double wmax = 1e-12 * scale;
    for (int i = 0; i < g; ++i) {
      if (!passive[i] && w(i) > wmax) {
        wmax = w(i);
        add = i;
      }
    }
    if (add < 0) break;
    passive[add] = true;

    for (int inner = 0; inner < outer_cap; ++inner) {
      std::vector<int> idx;
      for (int i = 0; i < g; ++i) {
        if (passive[i]) idx.push_back(i);
      }
      Matrix Gp(G.rows(), static_cast<int>(idx.size()));
      for (std::size_t j = 0; j < idx.size(); ++j) Gp.col(static_cast<int>(j)) = G.col(idx[j]);
      Vector s = Gp.completeOrthogonalDecomposition().solve(v);

      bool all_pos = true;
      for (int j = 0; j < s.size(); ++j) {
        if (s(j) <= 1e-14) {
          all_pos = false;
          break;
        }
      }
      if (all_pos) {
        mu.setZero();
        for (std::size_t j = 0; j < idx.size(); ++j) mu(idx[j]) = s(static_cast<int>(j));
        break;
      }

      double alpha = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < idx.size(); ++j) {
        if (s(static_cast<int>(j)) <= 1e-14) {
          const double muj = mu(idx[j]);
          const double denom = muj - s(static_cast<int>(j));
          if (denom > 0.0) alpha = std::min(alpha, muj / denom);
        }
      }
      if (!std::isfinite(alpha)) alpha = 0.0;
      for (std::size_t j = 0; j < idx.size(); ++j) {
        mu(idx[j]) += alpha * (s(static_cast<int>(j)) - mu(idx[j]));
      }
      for (int i = 0; i < g; ++i) {
        if (passive[i] && mu(i) <= 1e-14) {
          passive[i] = false;
          mu(i) = 0.0;
        }
      }
    }
  }
  return mu;
}

}  // namespace detail

}  // namespace altproj
