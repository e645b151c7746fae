#include "altproj/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace altproj {

LinearProgram::LinearProgram(Vector cost, Matrix rows, Vector rhs, std::vector<bool> nonneg_flags)
    : c(std::move(cost)), A(std::move(rows)), b(std::move(rhs)), nonneg(std::move(nonneg_flags)) {
  if (c.size() == 0 || c.norm() == 0.0) throw InvalidSet("linear program requires a nonzero cost");
  if (A.cols() != c.size() || A.rows() != b.size()) throw DimensionMismatch("inconsistent LP data");
  if (nonneg.size() != static_cast<std::size_t>(c.size())) {
    throw DimensionMismatch("one nonnegativity flag per variable required");
  }
}

Polyhedron LinearProgram::feasible_region() const {
  const int n = num_vars();
  int extra = 0;
  for (bool f : nonneg) extra += f ? 1 : 0;
  Matrix rows(A.rows() + extra, n);
  Vector rhs(A.rows() + extra);
  rows.topRows(A.rows()) = -A;
  rhs.head(A.rows()) = -b;
  int r = static_cast<int>(A.rows());
  for (int j = 0; j < n; ++j) {
    if (!nonneg[static_cast<std::size_t>(j)]) continue;
    rows.row(r).setZero();
    rows(r, j) = -1.0;
    rhs(r) = 0.0;
    ++r;
  }
  return Polyhedron(rows, rhs);
}

namespace oracle {

namespace {

bool lex_less(const Vector& a, const Vector& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

struct Incumbent {
  bool found = false;
  Vector point;
  double dist = std::numeric_limits<double>::infinity();
  double center_dist = 0.0;
  const Vector* center = nullptr;  // tie-break anchor

  void offer(const Vector& cand, double d) {
    // Among equal distances prefer the candidate nearest the box center:
    // lexicographic ties would drag the incumbent sideways along flat
    // distance plateaus and starve the refinement.
    const double cd = center != nullptr ? (cand - *center).norm() : 0.0;
    if (!found || d < dist || (d == dist && cd < center_dist) ||
        (d == dist && cd == center_dist && lex_less(cand, point))) {
      found = true;
      point = cand;
      dist = d;
      center_dist = cd;
    }
  }
};

// Visits every point of the level grid (row-major over axes).
template <class Fn>
void scan_grid(const Vector& lo, const Vector& hi, int resolution, Fn&& fn) {
  const int n = static_cast<int>(lo.size());
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  Vector pt(n);
  for (;;) {
    for (int d = 0; d < n; ++d) {
      const double f = resolution == 1 ? 0.5 : static_cast<double>(idx[static_cast<std::size_t>(d)]) / (resolution - 1);
      pt(d) = lo(d) + f * (hi(d) - lo(d));
    }
    fn(pt);
    int d = n - 1;
    while (d >= 0 && ++idx[static_cast<std::size_t>(d)] == resolution) {
      idx[static_cast<std::size_t>(d)] = 0;
      --d;
    }
    if (d < 0) break;
  }
}

double spacing_of(const Vector& lo, const Vector& hi, int resolution) {
  double h = 0.0;
  for (int d = 0; d < lo.size(); ++d) h = std::max(h, (hi(d) - lo(d)) / std::max(1, resolution - 1));
  return h;
}

}  // namespace

GridSpec make_grid(double lo, double hi, int dim, int resolution, int levels) {
  GridSpec g;
  g.lo = Vector::Constant(dim, lo);
  g.hi = Vector::Constant(dim, hi);
  g.resolution = resolution;
  g.refinement_levels = levels;
  return g;
}

double grid_error_bound(const GridSpec& grid) {
  const double width = (grid.hi - grid.lo).lpNorm<Eigen::Infinity>();
  return width / std::pow(4.0, grid.refinement_levels);
}

bool contains_direct(const ConvexSet& set, const Vector& x, double tol) {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Hyperplane>) {
          return std::abs(s.normal.dot(x) - s.offset) / s.normal.norm() <= tol;
        } else if constexpr (std::is_same_v<T, Halfspace>) {
          return (s.normal.dot(x) - s.offset) / s.normal.norm() <= tol;
        } else if constexpr (std::is_same_v<T, Polyhedron>) {
          for (int i = 0; i < s.A.rows(); ++i) {
            const double nrm = s.A.row(i).norm();
            if (nrm <= 1e-14) continue;
            if ((s.A.row(i).dot(x) - s.b(i)) / nrm > tol) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, Ball>) {
          return (x - s.center).norm() - s.radius <= tol;
        } else if constexpr (std::is_same_v<T, AffineSubspace>) {
          Vector d = x - s.base;
          if (s.directions.cols() > 0) d -= s.directions * (s.directions.transpose() * d);
          return d.norm() <= tol;
        } else if constexpr (std::is_same_v<T, QuadraticEpigraph>) {
          const int n = static_cast<int>(s.lin.size());
          const Vector xs = x.head(n);
          Vector grad(n + 1);
          grad.head(n) = s.quad * xs + s.lin;
          grad(n) = -s.t_sign;
          const double g =
              0.5 * xs.dot(s.quad * xs) + s.lin.dot(xs) + s.constant - s.t_sign * x(n);
          return g / std::max(1.0, grad.norm()) <= tol;
        } else if constexpr (std::is_same_v<T, IntersectionSet>) {
          for (const auto& member : s.members) {
            if (!contains_direct(member, x, tol)) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, ProductSet>) {
          const int n = s.factors.front().dimension();
          for (std::size_t i = 0; i < s.factors.size(); ++i) {
            if (!contains_direct(s.factors[i], x.segment(static_cast<int>(i) * n, n), tol)) return false;
          }
          return true;
        } else {
          Vector mean = Vector::Zero(s.block_dim);
          for (int i = 0; i < s.copies; ++i) mean += x.segment(i * s.block_dim, s.block_dim);
          mean /= static_cast<double>(s.copies);
          double dev2 = 0.0;
          for (int i = 0; i < s.copies; ++i) {
            dev2 += (x.segment(i * s.block_dim, s.block_dim) - mean).squaredNorm();
          }
          return std::sqrt(dev2) <= tol;
        }
      },
      set.variant());
}

Vector brute_force_projection(const ConvexSet& set, const Vector& point, const GridSpec& grid) {
  if (point.size() > 4) throw Error("grid projection oracle limited to dimension <= 4");
  const int n = static_cast<int>(point.size());
  Vector lo = grid.lo;
  Vector hi = grid.hi;
  Incumbent last;

  for (int level = 0; level <= grid.refinement_levels; ++level) {
    const double h = spacing_of(lo, hi, grid.resolution);
    const double eta = 0.5 * h * std::sqrt(static_cast<double>(n));
    // Each level is judged with its own membership slack; carrying
    // incumbents across levels would let a coarse near-feasible point
    // undercut the true projection forever.
    const Vector center = 0.5 * (lo + hi);
    Incumbent inc;
    inc.center = &center;
    scan_grid(lo, hi, grid.resolution, [&](const Vector& pt) {
      if (!contains_direct(set, pt, eta)) return;
      inc.offer(pt, (pt - point).norm());
    });
    if (inc.found) {
      last = inc;
      const Vector half = 0.125 * (hi - lo);
      lo = inc.point - half;
      hi = inc.point + half;
    } else {
      // Keep the box center; a finer level may reveal a thin set.
      const Vector mid = 0.5 * (lo + hi);
      const Vector half = 0.375 * (hi - lo);
      lo = mid - half;
      hi = mid + half;
    }
  }
  if (!last.found) throw NoFeasibleGridPoint("grid search found no point of the set in the box");
  return last.point;
}

Vector enumerate_projection(const Matrix& A, const Vector& b, const Vector& point) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  if (m > 20) throw Error("subset enumeration oracle limited to 20 rows");

  Incumbent inc;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    std::vector<int> act;
    for (int i = 0; i < m; ++i) {
      if (mask & (1u << i)) act.push_back(i);
    }
    if (static_cast<int>(act.size()) > n) continue;

    Vector x;
    if (act.empty()) {
      x = point;
    } else {
      Matrix As(static_cast<int>(act.size()), n);
      Vector bs(static_cast<int>(act.size()));
      for (std::size_t j = 0; j < act.size(); ++j) {
        As.row(static_cast<int>(j)) = A.row(act[j]);
        bs(static_cast<int>(j)) = b(act[j]);
      }
      // Projection onto the affine slice A_S x = b_S.
      Eigen::CompleteOrthogonalDecomposition<Matrix> cod(As * As.transpose());
      Vector lam = cod.solve(As * point - bs);
      x = point - As.transpose() * lam;
      if ((As * x - bs).lpNorm<Eigen::Infinity>() > 1e-8 * std::max(1.0, bs.lpNorm<Eigen::Infinity>())) {
        continue;  // inconsistent subset
      }
    }
    bool feasible = true;
    for (int i = 0; i < m; ++i) {
      const double nrm = A.row(i).norm();
      if (nrm <= 1e-14) continue;
      if ((A.row(i).dot(x) - b(i)) / nrm > 1e-9 * std::max(1.0, x.lpNorm<Eigen::Infinity>())) {
        feasible = false;
        break;
      }
    }
    if (feasible) inc.offer(x, (x - point).norm());
  }
  if (!inc.found) throw NoFeasibleGridPoint("subset enumeration found no feasible candidate");
  return inc.point;
}

std::pair<Vector, double> lp_vertex_solve(const LinearProgram& lp) {
  const int n = lp.num_vars();
  if (n > 8) throw Error("vertex enumeration limited to n <= 8");

  // Unified constraint list G x >= h.
  int extra = 0;
  for (bool f : lp.nonneg) extra += f ? 1 : 0;
  const int total = lp.num_rows() + extra;
  if (total > 20) throw Error("vertex enumeration limited to 20 constraints");
  Matrix G(total, n);
  Vector h(total);
  G.topRows(lp.num_rows()) = lp.A;
  h.head(lp.num_rows()) = lp.b;
  int r = lp.num_rows();
  for (int j = 0; j < n; ++j) {
    if (!lp.nonneg[static_cast<std::size_t>(j)]) continue;
    G.row(r).setZero();
    G(r, j) = 1.0;
    h(r) = 0.0;
    ++r;
  }

  auto feasible = [&](const Vector& x) {
    for (int i = 0; i < total; ++i) {
      const double nrm = G.row(i).norm();
      if (nrm <= 1e-14) continue;
      if ((G.row(i).dot(x) - h(i)) / nrm < -1e-9 * std::max(1.0, x.lpNorm<Eigen::Infinity>())) return false;
    }
    return true;
  };

  // Recession scan: direction w with G w >= 0 and <c,w> < 0 certifies an
  // unbounded objective. Extreme rays live in null spaces of (n-1)-subsets;
  // lineality directions live in the null space of all rows.
  auto check_direction = [&](const Vector& w) {
    const double nw = w.norm();
    if (nw <= 1e-12) return false;
    Vector u = w / nw;
    for (int sign = 0; sign < 2; ++sign) {
      const Vector v = sign == 0 ? u : Vector(-u);
      bool recession = true;
      for (int i = 0; i < total && recession; ++i) {
        if (G.row(i).dot(v) < -1e-10) recession = false;
      }
      if (recession && lp.c.dot(v) < -1e-10) return true;
    }
    return false;
  };

  std::vector<int> sel;
  auto unbounded_over_subsets = [&](auto&& self, int start, int depth) -> bool {
    if (depth == n - 1 || start == total) {
      if (static_cast<int>(sel.size()) != n - 1) return false;
      Matrix Gs(n - 1, n);
      for (std::size_t j = 0; j < sel.size(); ++j) Gs.row(static_cast<int>(j)) = G.row(sel[j]);
      Eigen::FullPivLU<Matrix> lu(Gs);
      lu.setThreshold(1e-10);
      Matrix null = lu.kernel();
      for (int j = 0; j < null.cols(); ++j) {
        if (check_direction(null.col(j))) return true;
      }
      return false;
    }
    for (int i = start; i < total; ++i) {
      sel.push_back(i);
      if (self(self, i + 1, depth + 1)) return true;
      sel.pop_back();
    }
    return false;
  };
  if (n == 1) {
    Vector e = Vector::Ones(1);
    if (check_direction(e)) throw UnboundedLp("LP objective unbounded below");
  } else if (unbounded_over_subsets(unbounded_over_subsets, 0, 0)) {
    throw UnboundedLp("LP objective unbounded below");
  }
  {
    Eigen::FullPivLU<Matrix> lu(G);
    lu.setThreshold(1e-10);
    Matrix null = lu.kernel();
    for (int j = 0; j < null.cols(); ++j) {
      if (check_direction(null.col(j))) throw UnboundedLp("LP objective unbounded below");
    }
  }

  bool found = false;
  Vector best;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<int> pick;
  auto visit_vertices = [&](auto&& self, int start, int depth) -> void {
    if (depth == n) {
      Matrix Gs(n, n);
      Vector hs(n);
      for (std::size_t j = 0; j < pick.size(); ++j) {
        Gs.row(static_cast<int>(j)) = G.row(pick[j]);
        hs(static_cast<int>(j)) = h(pick[j]);
      }
      Eigen::FullPivLU<Matrix> lu(Gs);
      lu.setThreshold(1e-10);
      if (lu.rank() < n) return;
      Vector x = lu.solve(hs);
      if (!feasible(x)) return;
      const double val = lp.c.dot(x);
      if (!found || val < best_val - 1e-12 ||
          (std::abs(val - best_val) <= 1e-12 && lex_less(x, best))) {
        found = true;
        best = x;
        best_val = val;
      }
      return;
    }
    for (int i = start; i <= total - (n - depth); ++i) {
      pick.push_back(i);
      self(self, i + 1, depth + 1);
      pick.pop_back();
    }
  };
  visit_vertices(visit_vertices, 0, 0);

  if (!found) throw InfeasibleLp("no feasible vertex (region empty or not pointed)");
  return {best, best_val};
}

BestPairResult grid_best_pair(const ConvexSet& X, const ConvexSet& Y, const GridSpec& grid) {
  if (grid.lo.size() > 3) throw Error("best-pair grid oracle limited to dimension <= 3");

  Vector lox = grid.lo, hix = grid.hi;
  Vector loy = grid.lo, hiy = grid.hi;
  bool ever_found = false;
  Vector bx, by;
  double best = std::numeric_limits<double>::infinity();

  for (int level = 0; level <= grid.refinement_levels; ++level) {
    const double hx = spacing_of(lox, hix, grid.resolution);
    const double hy = spacing_of(loy, hiy, grid.resolution);
    const double etax = 0.5 * hx * std::sqrt(static_cast<double>(grid.lo.size()));
    const double etay = 0.5 * hy * std::sqrt(static_cast<double>(grid.lo.size()));

    std::vector<Vector> xs, ys;
    scan_grid(lox, hix, grid.resolution, [&](const Vector& p) {
      if (contains_direct(X, p, etax)) xs.push_back(p);
    });
    scan_grid(loy, hiy, grid.resolution, [&](const Vector& p) {
      if (contains_direct(Y, p, etay)) ys.push_back(p);
    });
    // Fresh incumbent per level; coarse near-feasible pairs must not
    // survive into finer levels. Distance ties anchor to the box centers.
    const Vector cx = 0.5 * (lox + hix);
    const Vector cy = 0.5 * (loy + hiy);
    bool found = false;
    Vector lbx, lby;
    double lbest = std::numeric_limits<double>::infinity();
    double lanchor = 0.0;
    for (const auto& x : xs) {
      for (const auto& y : ys) {
        const double d = (x - y).norm();
        const double anchor = (x - cx).norm() + (y - cy).norm();
        if (!found || d < lbest || (d == lbest && anchor < lanchor) ||
            (d == lbest && anchor == lanchor &&
             (lex_less(x, lbx) || (!lex_less(lbx, x) && lex_less(y, lby))))) {
          found = true;
          lbest = d;
          lbx = x;
          lby = y;
          lanchor = anchor;
        }
      }
    }
    if (found) {
      ever_found = true;
      bx = lbx;
      by = lby;
      best = lbest;
      const Vector halfx = 0.125 * (hix - lox);
      lox = bx - halfx;
      hix = bx + halfx;
      const Vector halfy = 0.125 * (hiy - loy);
      loy = by - halfy;
      hiy = by + halfy;
    }
  }
  if (!ever_found) throw NoFeasibleGridPoint("best-pair grid search found no feasible pair");
  return {bx, by, best};
}

}  // namespace oracle
}  // namespace altproj
