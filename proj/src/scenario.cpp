#include "inavm/scenario.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

namespace inavm::scenario {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Quaternion axis_rotation(const Vec3& axis, double angle) {
  return {std::cos(0.5 * angle), std::sin(0.5 * angle) * axis};
}

template <typename Fn>
Vec3 gauss_legendre10(const Fn& f, double a, double b) {
  using Rule = boost::math::quadrature::gauss<double, 10>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Vec3 sum = Vec3::Zero();
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += w[i] * (f(mid - half * x[i]) + f(mid + half * x[i]));
  }
  return half * sum;
}

void check_window(const TruthSampler& truth, double t0, int n, double dt) {
  if (n < 1 || !(dt > 0.0)) throw std::invalid_argument("sample_increments: need n >= 1 and dt > 0");
  if (t0 < 0.0 || t0 + n * dt > truth.spec().duration * (1.0 + 1e-12)) {
    throw std::invalid_argument("sample_increments: window outside scenario duration");
  }
}

}  // namespace

Kind parse_kind(std::string_view name) {
  if (name == "static") return Kind::stationary;
  if (name == "constant_rate") return Kind::constant_rate;
  if (name == "coning") return Kind::coning;
  if (name == "coning_plus_translation") return Kind::coning_plus_translation;
  throw std::invalid_argument("unknown scenario kind: " + std::string(name));
}

std::string_view kind_name(Kind kind) {
  switch (kind) {
    case Kind::stationary: return "static";
    case Kind::constant_rate: return "constant_rate";
    case Kind::coning: return "coning";
    case Kind::coning_plus_translation: return "coning_plus_translation";
  }
  return "unknown";
}

void ScenarioSpec::validate() const {
  if (!(duration > 0.0)) throw std::invalid_argument("ScenarioSpec: duration must be positive");
  if (!(sample_rate > 2.0 * cone_freq_hz)) throw std::invalid_argument("ScenarioSpec: sample_rate must exceed 2 f_c");
  if (cone_half_angle < 0.0 || cone_half_angle > std::numbers::pi / 4.0) {
    throw std::invalid_argument("ScenarioSpec: cone half-angle must lie in [0, pi/4]");
  }
  if (kind == Kind::constant_rate && spin_axis.norm() == 0.0) {
    throw std::invalid_argument("ScenarioSpec: spin axis must be nonzero");
  }
  if (kind == Kind::coning_plus_translation && !(accel_freq_hz > 0.0)) {
    throw std::invalid_argument("ScenarioSpec: acceleration frequency must be positive");
  }
}

Quaternion attitude_from_euler(const earth::GeodeticPos& g, double yaw, double pitch, double roll) {
  const Quaternion q_ne = dcm_to_quat(earth::cne(g));
  const Quaternion q_nb =
      axis_rotation(Vec3::UnitY(), -yaw) * axis_rotation(Vec3::UnitZ(), pitch) * axis_rotation(Vec3::UnitX(), roll);
  return (q_ne * q_nb).normalized();
}

TruthSampler::TruthSampler(const ScenarioSpec& spec) : spec_(spec) {
  spec_.validate();
  if (spec_.kind == Kind::constant_rate) spec_.spin_axis.normalize();
  w_ie_ = spec_.include_earth_rate ? earth::earth_rate_e() : Vec3::Zero();
  p_origin_ = earth::lla2ecef(spec_.origin);
  c_ne_ = earth::cne(spec_.origin);
  q_eb0_ = attitude_from_euler(spec_.origin, spec_.yaw, spec_.pitch, spec_.roll);
}

Quaternion TruthSampler::motion(double t) const {
  switch (spec_.kind) {
    case Kind::stationary: return Quaternion::identity();
    case Kind::constant_rate: return axis_rotation(spec_.spin_axis, spec_.spin_rate * t);
    case Kind::coning:
    case Kind::coning_plus_translation: {
      const double s = std::sin(0.5 * spec_.cone_half_angle);
      const double ph = kTwoPi * spec_.cone_freq_hz * t;
      return {std::cos(0.5 * spec_.cone_half_angle), s * std::cos(ph), s * std::sin(ph), 0.0};
    }
  }
  return Quaternion::identity();
}

Vec3 TruthSampler::motion_rate(double t) const {
  switch (spec_.kind) {
    case Kind::stationary: return Vec3::Zero();
    case Kind::constant_rate: return spec_.spin_rate * spec_.spin_axis;
    case Kind::coning:
    case Kind::coning_plus_translation: {
      const double s = std::sin(0.5 * spec_.cone_half_angle);
      const double om = kTwoPi * spec_.cone_freq_hz;
      const double ph = om * t;
      const Quaternion dq(0.0, -s * om * std::sin(ph), s * om * std::cos(ph), 0.0);
      return 2.0 * (conj(motion(t)) * dq).eta;
    }
  }
  return Vec3::Zero();
}

Vec3 TruthSampler::offset_n(double t) const {
  if (!translating()) return Vec3::Zero();
  const double w = kTwoPi * spec_.accel_freq_hz;
  const double a = spec_.accel_amplitude;
  return spec_.cruise_velocity_n * t + Vec3::UnitX() * (a / w * (t - std::sin(w * t) / w));
}

Vec3 TruthSampler::velocity_n(double t) const {
  if (!translating()) return Vec3::Zero();
  const double w = kTwoPi * spec_.accel_freq_hz;
  return spec_.cruise_velocity_n + Vec3::UnitX() * (spec_.accel_amplitude / w * (1.0 - std::cos(w * t)));
}

Vec3 TruthSampler::accel_n(double t) const {
  if (!translating()) return Vec3::Zero();
  const double w = kTwoPi * spec_.accel_freq_hz;
  return Vec3::UnitX() * (spec_.accel_amplitude * std::sin(w * t));
}

Quaternion TruthSampler::attitude(double t) const { return q_eb0_ * motion(t); }
Vec3 TruthSampler::velocity(double t) const { return c_ne_ * velocity_n(t); }
Vec3 TruthSampler::position(double t) const { return p_origin_ + c_ne_ * offset_n(t); }
Vec3 TruthSampler::acceleration(double t) const { return c_ne_ * accel_n(t); }

Vec3 TruthSampler::displacement(double t0, double t1) const {
  if (!translating()) return Vec3::Zero();
  const double w = kTwoPi * spec_.accel_freq_hz;
  const double a = spec_.accel_amplitude;
  const double dt = t1 - t0;
  // sin(w t1) - sin(w t0) = 2 cos(w (t0 + t1) / 2) sin(w dt / 2)
  const double dsin = 2.0 * std::cos(0.5 * w * (t0 + t1)) * std::sin(0.5 * w * dt);
  const Vec3 d_n = spec_.cruise_velocity_n * dt + Vec3::UnitX() * (a / w * (dt - dsin / w));
  return c_ne_ * d_n;
}

Vec3 TruthSampler::body_rate(double t) const {
  return motion_rate(t) + rotate(conj(attitude(t)), w_ie_);
}

Vec3 TruthSampler::specific_force(double t) const {
  const Vec3 v = velocity(t);
  const Vec3 f_e = acceleration(t) + 2.0 * w_ie_.cross(v) - earth::gravity_e(position(t));
  return rotate(conj(attitude(t)), f_e);
}

NavState TruthSampler::state(double t) const { return {t, attitude(t), velocity(t), position(t)}; }

TruthSampler build_truth(const ScenarioSpec& spec) { return TruthSampler(spec); }

namespace {

void fill_sample(const TruthSampler& truth, double t0, double dt, int k, ImuBatch& out) {
  const double a = t0 + k * dt;
  const double b = t0 + (k + 1) * dt;
  out.dtheta[k] = gauss_legendre10([&](double t) { return truth.body_rate(t); }, a, b);
  out.dv[k] = gauss_legendre10([&](double t) { return truth.specific_force(t); }, a, b);
}

ImuBatch make_batch(int n, double dt) {
  ImuBatch batch;
  batch.dt = dt;
  batch.dtheta.resize(n);
  batch.dv.resize(n);
  return batch;
}

}  // namespace

ImuBatch sample_increments(const TruthSampler& truth, double t0, int n, double dt) {
  check_window(truth, t0, n, dt);
  ImuBatch batch = make_batch(n, dt);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k) fill_sample(truth, t0, dt, k, batch);
  return batch;
}

ImuBatch sample_increments_serial(const TruthSampler& truth, double t0, int n, double dt) {
  check_window(truth, t0, n, dt);
  ImuBatch batch = make_batch(n, dt);
  for (int k = 0; k < n; ++k) fill_sample(truth, t0, dt, k, batch);
  return batch;
}

std::vector<ImuBatch> sample_intervals(const TruthSampler& truth, int count, int n, double dt) {
  if (count < 1) throw std::invalid_argument("sample_intervals: need count >= 1");
  const ImuBatch all = sample_increments(truth, 0.0, count * n, dt);
  std::vector<ImuBatch> out(count);
  for (int i = 0; i < count; ++i) {
    out[i].dt = dt;
    out[i].dtheta.assign(all.dtheta.begin() + i * n, all.dtheta.begin() + (i + 1) * n);
    out[i].dv.assign(all.dv.begin() + i * n, all.dv.begin() + (i + 1) * n);
  }
  return out;
}

}  // namespace inavm::scenario
