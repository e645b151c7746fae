#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "altproj/geometry.hpp"

namespace altproj {

/// Seeded generator with hand-rolled distributions so identical seeds give
/// identical streams independent of the standard library's distribution
/// implementations.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  Vector gaussian_vector(int dim) {
    Vector g(dim);
    for (int i = 0; i < dim; ++i) g(i) = gaussian();
    return g;
  }

  /// Uniform in the closed ball of the given radius around center.
  Vector ball_point(const Vector& center, double radius) {
    Vector dir = gaussian_vector(static_cast<int>(center.size()));
    const double nrm = dir.norm();
    if (nrm == 0.0) return center;
    const double r = radius * std::pow(uniform(), 1.0 / static_cast<double>(center.size()));
    return center + (r / nrm) * dir;
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace altproj
