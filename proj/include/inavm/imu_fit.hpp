#ifndef INAVM_IMU_FIT_HPP
#define INAVM_IMU_FIT_HPP

#include <span>
#include <utility>
#include <vector>

#include "inavm/chebyshev.hpp"
#include "inavm/quaternion.hpp"

namespace inavm {

// N uniformly spaced gyro/accelerometer increments covering one update interval.
struct ImuBatch {
  double dt = 0.0;
  std::vector<Vec3> dtheta;  // rad
  std::vector<Vec3> dv;      // m/s

  int size() const { return static_cast<int>(dtheta.size()); }
  double t_span() const { return dt * static_cast<double>(dtheta.size()); }

  /// Throws std::invalid_argument on N < 2, dt <= 0, length mismatch or non-finite data.
  void validate() const;
};

namespace imu {

// Least-squares fit of a degree-n Chebyshev rate series to N increments,
//   inc_k = (t_N / 2) sum_i c_i int_{tau_{k-1}}^{tau_k} F_i,   tau_k = -1 + 2k/N.
// The pseudo-inverse is computed once by column-pivoted QR; fitting is then a
// single (n+1) x N product.
constexpr int kMaxFitDegree = 31;
using FitBlock = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor, kMaxFitDegree + 1, 3>;

class IncrementFitter {
 public:
  IncrementFitter(int n_samples, int degree);

  int samples() const { return n_samples_; }
  int degree() const { return degree_; }

  /// Coefficients of the physical rate (units of increment per second).
  Table fit(std::span<const Vec3> increments, double t_span) const;
  /// Same, into a stack block; degree must not exceed kMaxFitDegree.
  void fit(std::span<const Vec3> increments, double t_span, FitBlock& out) const;

 private:
  void check_count(std::size_t n) const;
  template <typename Out>
  void fit_into(std::span<const Vec3> increments, double t_span, Out& out) const;

  int n_samples_;
  int degree_;
  Eigen::MatrixXd pinv_t_;  // N x (degree+1), transposed pseudo-inverse without the t_N/2 factor
};

/// Fitted angular rate and specific force series; n_w, n_f <= N - 1.
std::pair<ChebSeries, ChebSeries> fit_increments(const ImuBatch& batch, int n_w, int n_f);

/// Collocation least-squares fit to N rate samples taken at tau_k = -1 + 2k/N, k = 1..N.
ChebSeries fit_rates(std::span<const Vec3> samples, int degree, double t_span);

}  // namespace imu
}  // namespace inavm

#endif  // INAVM_IMU_FIT_HPP
