#ifndef INAVM_NAVIGATOR_HPP
#define INAVM_NAVIGATOR_HPP

// Matrix-form functional iteration for strapdown navigation in the ECEF frame.
//
// Each update interval of N increments is processed as
//   1. fit Chebyshev series to angular rate and specific force,
//   2. iterate the attitude quaternion coefficients
//        b <- chi0 + t_N / (2 (M+1)) Cs diag(Q) (W^b- - W^e+),   Q <- F b,
//   3. iterate velocity and position coefficients together
//        s <- eta0 + t_N / (M+1) Cs Y,   rho <- varsigma0 + t_N / 2 Cd s,
//      where row k of Y is q f q^* - 2 w_e x v + g^e(p) at root sigma_k.
// Gravity is evaluated pointwise at the root positions of the previous pass.

#include <stdexcept>
#include <utility>

#include "inavm/chebyshev.hpp"
#include "inavm/imu_fit.hpp"
#include "inavm/quaternion.hpp"

namespace inavm {

struct NavError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NavState {
  double t = 0.0;
  Quaternion q;  // body -> ECEF rotation, C_b^e = quat_to_dcm(q)
  Vec3 v_e = Vec3::Zero();
  Vec3 p_e = Vec3::Zero();
};

struct IterationConfig {
  int m_q = 9;
  int m_v = 9;
  int m_p = 9;
  int n_w = -1;  // fitted rate degree; -1 means N - 1
  int n_f = -1;
  int max_iters = 9;
  double tol = 1e-16;
  // A pass also counts as converged once the RMS change is within
  // noise_ulps * eps * max|coefficient|, i.e. the iteration has stagnated at
  // floating-point noise. Zero disables the test.
  double noise_ulps = 8.0;
  bool renormalize = true;
  bool earth_rotation = true;
  bool gravity = true;

  /// Throws std::invalid_argument when degrees < 2, m_v != m_p, tol <= 0 or max_iters < 1.
  void validate() const;
  Vec3 earth_rate() const;
};

struct LoopDiagnostics {
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;  // last RMS coefficient change
};

struct IntervalSolution {
  ChebSeries q_series;  // 4 columns, [s, eta]
  ChebSeries v_series;  // 3 columns
  ChebSeries p_series;  // 3 columns
  LoopDiagnostics attitude;
  LoopDiagnostics velpos;
  double e_q = 0.0;
  double e_v = 0.0;
  double e_p = 0.0;
};

/// sqrt(sum_i |next_i - prev_i|^2 / (M + 1)).
double rms_coeff_delta(const Table& prev, const Table& next);

struct AttitudeResult {
  ChebSeries q_series;
  LoopDiagnostics diag;
};

AttitudeResult attitude_iterate(const Quaternion& q0, const ChebSeries& w_series, const Vec3& w_e,
                                const IterationConfig& cfg, const SpectralOperators& ops);

struct VelPosResult {
  ChebSeries v_series;
  ChebSeries p_series;
  LoopDiagnostics diag;
  double e_v = 0.0;
  double e_p = 0.0;
};

/// Requires a converged attitude series on the same interval. Gravity is
/// included only when cfg.gravity is set.
VelPosResult velpos_iterate(const Vec3& v0, const Vec3& p0, const ChebSeries& q_series, const ChebSeries& f_series,
                            const Vec3& w_e, const IterationConfig& cfg, const SpectralOperators& ops);

struct StepResult {
  NavState state;
  IntervalSolution solution;
};

// Holds the precomputed operators and fitting pseudo-inverses for one
// configuration and batch size. Const member functions are thread-safe.
class Navigator {
 public:
  Navigator(const IterationConfig& cfg, int samples_per_interval);

  const IterationConfig& config() const { return cfg_; }
  int samples_per_interval() const { return n_samples_; }

  StepResult step(const NavState& state, const ImuBatch& batch) const;

 private:
  IterationConfig cfg_;
  int n_samples_;
  const SpectralOperators* att_ops_;
  const SpectralOperators* vp_ops_;
  imu::IncrementFitter w_fit_;
  imu::IncrementFitter f_fit_;
};

/// One update interval: fit, attitude loop, velocity/position loop.
std::pair<NavState, IntervalSolution> step(const NavState& state, const ImuBatch& batch, const IterationConfig& cfg);

}  // namespace inavm

#endif  // INAVM_NAVIGATOR_HPP
