#ifndef INAVM_EARTH_HPP
#define INAVM_EARTH_HPP

// WGS-84 Earth model: rotation, geodetic <-> ECEF conversion, and normal
// gravity. The local navigation frame is North-Up-East throughout.

#include "inavm/quaternion.hpp"

namespace inavm::earth {

struct Wgs84 {
  static constexpr double a = 6378137.0;
  static constexpr double inv_f = 298.257223563;
  static constexpr double f = 1.0 / inv_f;
  static constexpr double b = a * (1.0 - f);
  static constexpr double e2 = f * (2.0 - f);
  static constexpr double ep2 = e2 / (1.0 - e2);
  static constexpr double omega = 7.292115e-5;  // rad/s
  static constexpr double gm = 3.986004418e14;  // m^3/s^2
  static constexpr double gamma_e = 9.7803253359;
  static constexpr double gamma_p = 9.8321849378;
};

/// Longitude, latitude (rad) and ellipsoidal height (m), in that order.
struct GeodeticPos {
  double lon = 0.0;
  double lat = 0.0;
  double h = 0.0;
};

/// [0, 0, Omega].
Vec3 earth_rate_e();

GeodeticPos ecef2lla(const Vec3& p);
Vec3 lla2ecef(const GeodeticPos& g);

/// Navigation (North-Up-East) to ECEF rotation.
Mat3 cne(const GeodeticPos& g);

/// Somigliana normal gravity on the ellipsoid with the second-order free-air
/// correction:
///   gamma0 = gamma_e (1 + k sin^2 L) / sqrt(1 - e^2 sin^2 L),  k = b gamma_p / (a gamma_e) - 1
///   gamma  = gamma0 (1 - 2 h (1 + f + m - 2 f sin^2 L) / a + 3 h^2 / a^2),  m = Omega^2 a^2 b / GM
double normal_gravity(double lat, double h);

/// [0, -gamma, 0] in North-Up-East.
Vec3 gravity_n(const GeodeticPos& g);

/// C_n^e(ecef2lla(p)) gravity_n(ecef2lla(p)).
Vec3 gravity_e(const Vec3& p);

/// gravity_e at n points given as coordinate arrays; outputs may not alias inputs.
/// Throws std::domain_error if any point is within 100 km of the geocenter.
void gravity_e_batch(int n, const double* x, const double* y, const double* z, double* gx, double* gy, double* gz);

}  // namespace inavm::earth

#endif  // INAVM_EARTH_HPP
