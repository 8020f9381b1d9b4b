#ifndef INAVM_SCENARIO_HPP
#define INAVM_SCENARIO_HPP

// Analytic trajectories with exact attitude, velocity, position, body rate and
// specific force, for driving the navigators with error-free increments.
//
// The body attitude relative to the initial North-Up-East frame is
//   q_nb(t) = q_euler(yaw, pitch, roll) o q_motion(t),
// with q_motion one of identity, constant-rate spin, or the coning motion
//   [cos(a/2), sin(a/2) cos(2 pi f t), sin(a/2) sin(2 pi f t), 0].
// The ECEF attitude is q_ne o q_nb. Translation (coning_plus_translation only)
// is a cruise velocity plus a sinusoidal North acceleration of amplitude A:
//   a_n(t) = A sin(w t),  v_n(t) = v_c + A/w (1 - cos(w t)),  d_n(t) = v_c t + A/w (t - sin(w t)/w).
// Rates and specific force follow by inverting the mechanization:
//   w_ib^b = 2 q_motion^* o dq_motion/dt + C_e^b w_ie,
//   f^b    = C_e^b (a_e + 2 w_ie x v_e - g^e(p_e)).

#include <string_view>
#include <vector>

#include "inavm/earth.hpp"
#include "inavm/imu_fit.hpp"
#include "inavm/navigator.hpp"

namespace inavm::scenario {

enum class Kind { stationary, constant_rate, coning, coning_plus_translation };

Kind parse_kind(std::string_view name);
std::string_view kind_name(Kind kind);

struct ScenarioSpec {
  Kind kind = Kind::coning;
  double cone_half_angle = 1.0 * 3.14159265358979323846 / 180.0;  // rad
  double cone_freq_hz = 1.0;
  Vec3 spin_axis = Vec3::UnitZ();
  double spin_rate = 1.0;  // rad/s, constant_rate only
  earth::GeodeticPos origin{0.0, 45.0 * 3.14159265358979323846 / 180.0, 100.0};
  Vec3 cruise_velocity_n = Vec3::Zero();  // North-Up-East, m/s
  double accel_amplitude = 10.0;          // m/s^2
  double accel_freq_hz = 1.0;
  double yaw = 0.0;  // rad, clockwise from North about Up
  double pitch = 0.0;
  double roll = 0.0;
  double duration = 600.0;     // s
  double sample_rate = 100.0;  // Hz
  bool include_earth_rate = true;

  /// Throws std::invalid_argument on sample_rate <= 2 f_c, duration <= 0 or a outside [0, pi/4].
  void validate() const;
};

/// Body-to-ECEF quaternion for yaw/pitch/roll relative to North-Up-East at g.
/// Zero angles put body x North, y Up, z East.
Quaternion attitude_from_euler(const earth::GeodeticPos& g, double yaw, double pitch, double roll);

class TruthSampler {
 public:
  explicit TruthSampler(const ScenarioSpec& spec);

  const ScenarioSpec& spec() const { return spec_; }
  const Vec3& earth_rate() const { return w_ie_; }

  Quaternion attitude(double t) const;
  Vec3 velocity(double t) const;
  Vec3 position(double t) const;
  /// position(t1) - position(t0), computed without cancellation against the origin.
  Vec3 displacement(double t0, double t1) const;
  Vec3 acceleration(double t) const;
  Vec3 body_rate(double t) const;
  Vec3 specific_force(double t) const;
  NavState state(double t) const;

 private:
  Quaternion motion(double t) const;
  Vec3 motion_rate(double t) const;  // w_eb^b
  Vec3 offset_n(double t) const;
  Vec3 velocity_n(double t) const;
  Vec3 accel_n(double t) const;
  bool translating() const { return spec_.kind == Kind::coning_plus_translation; }

  ScenarioSpec spec_;
  Vec3 w_ie_;
  Vec3 p_origin_;
  Mat3 c_ne_;
  Quaternion q_eb0_;  // q_ne o q_euler
};

TruthSampler build_truth(const ScenarioSpec& spec);

/// Increments over [t0 + k dt, t0 + (k+1) dt], k = 0..N-1, by 10-point
/// Gauss-Legendre quadrature per sample. Samples are computed in parallel.
ImuBatch sample_increments(const TruthSampler& truth, double t0, int n, double dt);

/// Single-threaded reference of sample_increments; results are bit-identical.
ImuBatch sample_increments_serial(const TruthSampler& truth, double t0, int n, double dt);

/// Consecutive update batches of n samples each on the global grid k * dt,
/// k = 0 .. count * n. Sample boundaries are computed from the global index so
/// that neighbouring batches share them exactly.
std::vector<ImuBatch> sample_intervals(const TruthSampler& truth, int count, int n, double dt);

}  // namespace inavm::scenario

#endif  // INAVM_SCENARIO_HPP
