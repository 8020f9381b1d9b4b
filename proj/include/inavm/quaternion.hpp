#ifndef INAVM_QUATERNION_HPP
#define INAVM_QUATERNION_HPP

// Scalar-first Hamilton quaternions and the small fixed-size algebra used by
// the ECEF mechanization. A 3-vector multiplies a quaternion as [0, v].

#include <Eigen/Dense>

namespace inavm {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

struct Quaternion {
  double s = 1.0;
  Vec3 eta = Vec3::Zero();

  Quaternion() = default;
  Quaternion(double scalar, const Vec3& vec) : s(scalar), eta(vec) {}
  Quaternion(double w, double x, double y, double z) : s(w), eta(x, y, z) {}

  static Quaternion identity() { return {}; }
  static Quaternion pure(const Vec3& v) { return {0.0, v}; }
  static Quaternion from_vec4(const Vec4& v) { return {v[0], v.tail<3>()}; }

  Vec4 vec4() const { return {s, eta.x(), eta.y(), eta.z()}; }
  double norm() const { return std::sqrt(s * s + eta.squaredNorm()); }
  Quaternion normalized() const;

  Quaternion operator-() const { return {-s, -eta}; }
};

Quaternion quat_mul(const Quaternion& a, const Quaternion& b);
inline Quaternion operator*(const Quaternion& a, const Quaternion& b) { return quat_mul(a, b); }

/// Quaternion-vector product a * [0, v].
Quaternion quat_mul(const Quaternion& a, const Vec3& v);
/// Vector-quaternion product [0, v] * a.
Quaternion quat_mul(const Vec3& v, const Quaternion& a);

Quaternion conj(const Quaternion& q);

/// [q]+ with q * p = [q]+ p.
Mat4 qplus(const Quaternion& q);
/// [q]- with p * q = [q]- p.
Mat4 qminus(const Quaternion& q);

Mat3 skew(const Vec3& a);

/// C = (s^2 - eta'eta) I + 2 eta eta' + 2 s [eta x]. Throws std::domain_error
/// when | |q| - 1 | > 1e-9.
Mat3 quat_to_dcm(const Quaternion& q);

/// Vector part of q * [0, v] * q^*, without the unit-norm check.
Vec3 rotate(const Quaternion& q, const Vec3& v);

/// Unit quaternion of the rotation vector phi: [cos(|phi|/2), sin(|phi|/2) phi/|phi|].
Quaternion from_rotation_vector(const Vec3& phi);

/// Inverse of quat_to_dcm (Shepperd's method); scalar part returned non-negative.
Quaternion dcm_to_quat(const Mat3& C);

/// Magnitude of the rotation between two attitudes, 2 atan2(|eta|, |s|) of conj(a) * b.
double principal_angle(const Quaternion& a, const Quaternion& b);

}  // namespace inavm

#endif  // INAVM_QUATERNION_HPP
