#ifndef INAVM_TESTS_SUPPORT_HPP
#define INAVM_TESTS_SUPPORT_HPP

// Seeded generators for property tests, shared by the unit tests and the
// acceptance binary.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "inavm/chebyshev.hpp"
#include "inavm/earth.hpp"
#include "inavm/imu_fit.hpp"
#include "inavm/quaternion.hpp"

namespace inavm::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }

  Vec3 vec(double scale = 1.0) { return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)}; }

  Vec3 unit_vec() {
    Vec3 v(normal(), normal(), normal());
    while (v.norm() < 1e-3) v = Vec3(normal(), normal(), normal());
    return v.normalized();
  }

  /// Any quaternion, not normalized.
  Quaternion quat(double scale = 1.0) { return {uniform(-scale, scale), vec(scale)}; }

  Quaternion unit_quat() {
    Quaternion q(normal(), normal(), normal(), normal());
    while (q.norm() < 1e-3) q = Quaternion(normal(), normal(), normal(), normal());
    return q.normalized();
  }

  Table table(int rows, int cols, double scale = 1.0) {
    Table t(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) t(i, j) = uniform(-scale, scale);
    return t;
  }

  /// Chebyshev coefficients of a smooth function: row j scaled by decay^j,
  /// then the whole table rescaled so the series stays within `bound` in norm.
  Table smooth_series(int degree, int cols, double bound, double decay = 0.1) {
    Table c(degree + 1, cols);
    double w = 1.0;
    for (int j = 0; j <= degree; ++j, w *= decay)
      for (int k = 0; k < cols; ++k) c(j, k) = w * uniform(-1.0, 1.0);
    // |series(tau)| <= sum of row norms
    double worst = 0.0;
    for (int j = 0; j <= degree; ++j) worst += c.row(j).norm();
    c *= uniform(0.2, 1.0) * bound / worst;
    return c;
  }

  /// Point in the terrestrial envelope: |lat| <= 89.9 deg, h in [-5 km, 100 km].
  earth::GeodeticPos geodetic() {
    constexpr double deg = std::numbers::pi / 180.0;
    return {uniform(-std::numbers::pi, std::numbers::pi), uniform(-89.9, 89.9) * deg, uniform(-5000.0, 100000.0)};
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Exact increments of a rate series over N equal sub-intervals of t_span.
inline std::vector<Vec3> increments_of(const Table& c, int n, double t_span) {
  std::vector<Vec3> out(n, Vec3::Zero());
  for (int k = 1; k <= n; ++k) {
    const double lo = -1.0 + 2.0 * (k - 1) / n;
    const double hi = -1.0 + 2.0 * k / n;
    for (int i = 0; i < c.rows(); ++i) out[k - 1] += (0.5 * t_span) * cheb::defint(i, lo, hi) * c.row(i).transpose();
  }
  return out;
}

inline ImuBatch batch_of(const Table& w, const Table& f, int n, double t_span) {
  ImuBatch b;
  b.dt = t_span / n;
  b.dtheta = increments_of(w, n, t_span);
  b.dv = increments_of(f, n, t_span);
  return b;
}

inline double max_abs_diff(const Table& a, const Table& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace inavm::testing

#endif  // INAVM_TESTS_SUPPORT_HPP
