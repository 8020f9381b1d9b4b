#include "inavm/earth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace inavm::earth {

namespace {

constexpr int kBowringIterations = 5;
// Squared sine of the latitude shift below which one more pass is at roundoff.
constexpr double kSettledShift2 = 1e-18;
constexpr int kChunk = 16;

// Geodetic quantities for up to kChunk points. Bowring's iteration runs on
// unnormalized (sin, cos) pairs of the reduced and geodetic latitudes, so no
// trigonometric calls are needed; the loops are laid out to vectorize. Two
// passes reach roundoff for terrestrial heights, further passes run only while
// some latitude is still moving.
struct GeodeticChunk {
  double sin_lat[kChunk], cos_lat[kChunk];
  double sin_lon[kChunk], cos_lon[kChunk];
  double h[kChunk];
  double w[kChunk];  // sqrt(1 - e^2 sin^2 L)
};

void geodetic_chunk(int m, const double* x, const double* y, const double* z, GeodeticChunk& out) {
  using W = Wgs84;
  bool polar = false;
  for (int k = 0; k < m; ++k) {
    const double rxy2 = x[k] * x[k] + y[k] * y[k];
    if (rxy2 + z[k] * z[k] <= 1e10) throw std::domain_error("ecef2lla: position within 100 km of the geocenter");
    polar = polar || rxy2 < 1.0;
  }

  double rxy[kChunk], nb[kChunk], db[kChunk], nl[kChunk], dl[kChunk];
#pragma omp simd
  for (int k = 0; k < m; ++k) {
    rxy[k] = std::sqrt(x[k] * x[k] + y[k] * y[k]);
    nb[k] = W::a * z[k];
    db[k] = W::b * rxy[k];
    nl[k] = 0.0;
    dl[k] = 1.0;
  }
  for (int it = 0; it < kBowringIterations; ++it) {
    int moving = 0;
#pragma omp simd reduction(+ : moving)
    for (int k = 0; k < m; ++k) {
      const double rb = 1.0 / std::sqrt(nb[k] * nb[k] + db[k] * db[k]);
      const double sb = nb[k] * rb;
      const double cb = db[k] * rb;
      const double n_next = z[k] + W::ep2 * W::b * sb * sb * sb;
      const double d_next = rxy[k] - W::e2 * W::a * cb * cb * cb;
      // sin^2 of the latitude shift, scaled by both squared lengths
      const double cross = n_next * dl[k] - d_next * nl[k];
      const double len2 = (n_next * n_next + d_next * d_next) * (nl[k] * nl[k] + dl[k] * dl[k]);
      moving += cross * cross >= kSettledShift2 * len2 ? 1 : 0;
      nl[k] = n_next;
      dl[k] = d_next;
      nb[k] = (1.0 - W::f) * n_next;
      db[k] = d_next;
    }
    if (it >= 1 && moving == 0) break;
  }
#pragma omp simd
  for (int k = 0; k < m; ++k) {
    const double r = 1.0 / std::sqrt(nl[k] * nl[k] + dl[k] * dl[k]);
    const double sl = nl[k] * r;
    const double cl = dl[k] * r;
    const double w = std::sqrt(1.0 - W::e2 * sl * sl);
    const double inv = 1.0 / rxy[k];
    out.sin_lat[k] = sl;
    out.cos_lat[k] = cl;
    out.w[k] = w;
    out.h[k] = rxy[k] * cl + z[k] * sl - W::a * w;
    out.sin_lon[k] = y[k] * inv;
    out.cos_lon[k] = x[k] * inv;
  }
  if (polar) {
    for (int k = 0; k < m; ++k) {
      if (x[k] * x[k] + y[k] * y[k] >= 1.0) continue;
      out.sin_lat[k] = z[k] >= 0.0 ? 1.0 : -1.0;
      out.cos_lat[k] = 0.0;
      out.w[k] = std::sqrt(1.0 - W::e2);
      out.h[k] = std::abs(z[k]) - W::b;
      out.sin_lon[k] = 0.0;
      out.cos_lon[k] = 1.0;
    }
  }
}

// Somigliana normal gravity from sin^2 L and w = sqrt(1 - e^2 sin^2 L), with
// the second-order free-air height correction.
inline double normal_gravity_sw(double sin2, double w, double h) {
  using W = Wgs84;
  constexpr double k = W::b * W::gamma_p / (W::a * W::gamma_e) - 1.0;
  constexpr double m = W::omega * W::omega * W::a * W::a * W::b / W::gm;
  constexpr double inv_a = 1.0 / W::a;
  const double g0 = W::gamma_e * (1.0 + k * sin2) / w;
  const double u = h * inv_a;
  return g0 * (1.0 - 2.0 * u * (1.0 + W::f + m - 2.0 * W::f * sin2) + 3.0 * u * u);
}

}  // namespace

Vec3 earth_rate_e() { return {0.0, 0.0, Wgs84::omega}; }

GeodeticPos ecef2lla(const Vec3& p) {
  GeodeticChunk t;
  geodetic_chunk(1, &p.x(), &p.y(), &p.z(), t);
  GeodeticPos g;
  g.lon = std::atan2(t.sin_lon[0], t.cos_lon[0]);
  if (g.lon <= -std::numbers::pi) g.lon = std::numbers::pi;
  g.lat = std::atan2(t.sin_lat[0], t.cos_lat[0]);
  g.h = t.h[0];
  return g;
}

Vec3 lla2ecef(const GeodeticPos& g) {
  using W = Wgs84;
  const double sl = std::sin(g.lat);
  const double cl = std::cos(g.lat);
  const double rn = W::a / std::sqrt(1.0 - W::e2 * sl * sl);
  return {(rn + g.h) * cl * std::cos(g.lon), (rn + g.h) * cl * std::sin(g.lon), (rn * (1.0 - W::e2) + g.h) * sl};
}

Mat3 cne(const GeodeticPos& g) {
  const double sl = std::sin(g.lat), cl = std::cos(g.lat);
  const double so = std::sin(g.lon), co = std::cos(g.lon);
  Mat3 c;
  c << -sl * co, cl * co, -so,
       -sl * so, cl * so, co,
       cl, sl, 0.0;
  return c;
}

double normal_gravity(double lat, double h) {
  const double s = std::sin(lat);
  return normal_gravity_sw(s * s, std::sqrt(1.0 - Wgs84::e2 * s * s), h);
}

Vec3 gravity_n(const GeodeticPos& g) { return {0.0, -normal_gravity(g.lat, g.h), 0.0}; }

Vec3 gravity_e(const Vec3& p) {
  Vec3 g;
  gravity_e_batch(1, &p.x(), &p.y(), &p.z(), &g.x(), &g.y(), &g.z());
  return g;
}

void gravity_e_batch(int n, const double* x, const double* y, const double* z, double* gx, double* gy, double* gz) {
  GeodeticChunk t;
  for (int base = 0; base < n; base += kChunk) {
    const int m = std::min(kChunk, n - base);
    geodetic_chunk(m, x + base, y + base, z + base, t);
    // -gamma times the Up column of C_n^e
#pragma omp simd
    for (int k = 0; k < m; ++k) {
      const double gamma = normal_gravity_sw(t.sin_lat[k] * t.sin_lat[k], t.w[k], t.h[k]);
      gx[base + k] = -gamma * t.cos_lat[k] * t.cos_lon[k];
      gy[base + k] = -gamma * t.cos_lat[k] * t.sin_lon[k];
      gz[base + k] = -gamma * t.sin_lat[k];
    }
  }
}

}  // namespace inavm::earth
