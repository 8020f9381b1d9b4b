#include "inavm/quaternion.hpp"

#include <cmath>
#include <stdexcept>

namespace inavm {

Quaternion Quaternion::normalized() const {
  const double n = norm();
  return {s / n, eta / n};
}

Quaternion quat_mul(const Quaternion& a, const Quaternion& b) {
  return {a.s * b.s - a.eta.dot(b.eta), a.s * b.eta + b.s * a.eta + a.eta.cross(b.eta)};
}

Quaternion quat_mul(const Quaternion& a, const Vec3& v) {
  return {-a.eta.dot(v), a.s * v + a.eta.cross(v)};
}

Quaternion quat_mul(const Vec3& v, const Quaternion& a) {
  return {-v.dot(a.eta), a.s * v + v.cross(a.eta)};
}

Quaternion conj(const Quaternion& q) { return {q.s, -q.eta}; }

Mat3 skew(const Vec3& a) {
  Mat3 m;
  m << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return m;
}

Mat4 qplus(const Quaternion& q) {
  Mat4 m;
  m(0, 0) = q.s;
  m.block<1, 3>(0, 1) = -q.eta.transpose();
  m.block<3, 1>(1, 0) = q.eta;
  m.block<3, 3>(1, 1) = q.s * Mat3::Identity() + skew(q.eta);
  return m;
}

Mat4 qminus(const Quaternion& q) {
  Mat4 m;
  m(0, 0) = q.s;
  m.block<1, 3>(0, 1) = -q.eta.transpose();
  m.block<3, 1>(1, 0) = q.eta;
  m.block<3, 3>(1, 1) = q.s * Mat3::Identity() - skew(q.eta);
  return m;
}

Mat3 quat_to_dcm(const Quaternion& q) {
  if (std::abs(q.norm() - 1.0) > 1e-9) throw std::domain_error("quat_to_dcm: quaternion is not unit");
  return (q.s * q.s - q.eta.squaredNorm()) * Mat3::Identity() + 2.0 * q.eta * q.eta.transpose() +
         2.0 * q.s * skew(q.eta);
}

Vec3 rotate(const Quaternion& q, const Vec3& v) {
  const Vec3 t = 2.0 * q.eta.cross(v);
  return v + q.s * t + q.eta.cross(t) + (q.s * q.s + q.eta.squaredNorm() - 1.0) * v;
}

Quaternion from_rotation_vector(const Vec3& phi) {
  const double angle = phi.norm();
  if (angle < 1e-8) {
    // Series to fourth order; the truncation error is below 1e-33.
    const double a2 = angle * angle;
    return {1.0 - a2 / 8.0 + a2 * a2 / 384.0, (0.5 - a2 / 48.0) * phi};
  }
  return {std::cos(0.5 * angle), (std::sin(0.5 * angle) / angle) * phi};
}

Quaternion dcm_to_quat(const Mat3& C) {
  const double tr = C.trace();
  Quaternion q;
  if (tr >= C(0, 0) && tr >= C(1, 1) && tr >= C(2, 2)) {
    const double s = 0.5 * std::sqrt(1.0 + tr);
    q = {s, Vec3(C(2, 1) - C(1, 2), C(0, 2) - C(2, 0), C(1, 0) - C(0, 1)) / (4.0 * s)};
  } else if (C(0, 0) >= C(1, 1) && C(0, 0) >= C(2, 2)) {
    const double x = 0.5 * std::sqrt(1.0 + 2.0 * C(0, 0) - tr);
    q = {(C(2, 1) - C(1, 2)) / (4.0 * x), Vec3(x, (C(0, 1) + C(1, 0)) / (4.0 * x), (C(0, 2) + C(2, 0)) / (4.0 * x))};
  } else if (C(1, 1) >= C(2, 2)) {
    const double y = 0.5 * std::sqrt(1.0 + 2.0 * C(1, 1) - tr);
    q = {(C(0, 2) - C(2, 0)) / (4.0 * y), Vec3((C(0, 1) + C(1, 0)) / (4.0 * y), y, (C(1, 2) + C(2, 1)) / (4.0 * y))};
  } else {
    const double z = 0.5 * std::sqrt(1.0 + 2.0 * C(2, 2) - tr);
    q = {(C(1, 0) - C(0, 1)) / (4.0 * z), Vec3((C(0, 2) + C(2, 0)) / (4.0 * z), (C(1, 2) + C(2, 1)) / (4.0 * z), z)};
  }
  if (q.s < 0.0) q = -q;
  return q.normalized();
}

double principal_angle(const Quaternion& a, const Quaternion& b) {
  const Quaternion d = conj(a) * b;
  return 2.0 * std::atan2(d.eta.norm(), std::abs(d.s));
}

}  // namespace inavm
