#ifndef INAVM_REFERENCE_HPP
#define INAVM_REFERENCE_HPP

// Comparison algorithms for the matrix navigator.
//
// NaiveNavigator expands every quaternion product term by term through the
// Chebyshev product rule F_i F_j = (F_{i+j} + F_{|i-j|}) / 2, integrates the
// full-degree result and only then truncates. It converges to the same fixed
// point as the matrix form and serves as its correctness oracle and speed
// baseline. Gravity is sampled at the Chebyshev roots and transformed to
// degree m_v coefficients, as in the matrix form.
//
// two_sample_step is the classical two-sample strapdown update:
//   phi     = dth1 + dth2 + 2/3 dth1 x dth2
//   dv_rot  = 1/2 dth x dv
//   dv_scul = 2/3 (dth1 x dv2 + dv1 x dth2)
//   q      <- q_earth(-w_e T) o q o q(phi)
//   v      <- v + C(q) (dv + dv_rot + dv_scul) - T/2 w_e x C(q) dv + (g(p_mid) - 2 w_e x v_mid) T
//   p      <- p + (v_old + v_new) T / 2
// with T = 2 dt, p_mid = p + v T / 2 and v_mid the half-step velocity estimate.

#include <algorithm>

#include "inavm/navigator.hpp"

namespace inavm::ref {

// Degrees kept after truncation, and the raw degrees of the expanded products.
struct TruncationPolicy {
  int m_q = 9;
  int m_v = 9;
  int m_p = 9;

  int raw_attitude_degree(int n_w) const { return m_q + n_w + 1; }
  int raw_velocity_degree(int n_f) const { return std::max(2 * m_q + n_f, m_v) + 1; }
  int raw_position_degree() const { return m_v + 1; }
};

AttitudeResult naive_attitude_iterate(const Quaternion& q0, const ChebSeries& w_series, const Vec3& w_e,
                                      const IterationConfig& cfg);

VelPosResult naive_velpos_iterate(const Vec3& v0, const Vec3& p0, const ChebSeries& q_series,
                                  const ChebSeries& f_series, const Vec3& w_e, const IterationConfig& cfg);

class NaiveNavigator {
 public:
  NaiveNavigator(const IterationConfig& cfg, int samples_per_interval);

  const IterationConfig& config() const { return cfg_; }
  StepResult step(const NavState& state, const ImuBatch& batch) const;

 private:
  IterationConfig cfg_;
  int n_samples_;
  imu::IncrementFitter w_fit_;
  imu::IncrementFitter f_fit_;
};

struct TwoSampleOptions {
  bool earth_rotation = true;
  bool gravity = true;
  bool renormalize = true;
};

/// Consumes the batch pairwise; throws std::invalid_argument for an odd sample count.
NavState two_sample_step(const NavState& state, const ImuBatch& batch, const TwoSampleOptions& opt = {});

}  // namespace inavm::ref

#endif  // INAVM_REFERENCE_HPP
