#include <stdexcept>

#include "inavm/earth.hpp"
#include "inavm/reference.hpp"

namespace inavm::ref {

NavState two_sample_step(const NavState& state, const ImuBatch& batch, const TwoSampleOptions& opt) {
  batch.validate();
  if (batch.size() % 2 != 0) throw std::invalid_argument("two_sample_step: odd sample count");

  const double T = 2.0 * batch.dt;
  const Vec3 w_e = opt.earth_rotation ? earth::earth_rate_e() : Vec3::Zero();
  const Quaternion q_earth = from_rotation_vector(-T * w_e);

  Quaternion q = state.q;
  Vec3 v = state.v_e;
  Vec3 p = state.p_e;
  for (int k = 0; k < batch.size(); k += 2) {
    const Vec3& dth1 = batch.dtheta[k];
    const Vec3& dth2 = batch.dtheta[k + 1];
    const Vec3& dv1 = batch.dv[k];
    const Vec3& dv2 = batch.dv[k + 1];
    const Vec3 dth = dth1 + dth2;
    const Vec3 dv = dv1 + dv2;

    const Vec3 phi = dth + (2.0 / 3.0) * dth1.cross(dth2);
    const Vec3 dv_rot = 0.5 * dth.cross(dv);
    const Vec3 dv_scul = (2.0 / 3.0) * (dth1.cross(dv2) + dv1.cross(dth2));

    const Vec3 dv_e = rotate(q, dv + dv_rot + dv_scul) - (0.5 * T) * w_e.cross(rotate(q, dv));
    const Vec3 p_mid = p + (0.5 * T) * v;
    const Vec3 g = opt.gravity ? earth::gravity_e(p_mid) : Vec3::Zero();
    const Vec3 v_mid = v + 0.5 * (dv_e + T * g);
    const Vec3 v_next = v + dv_e + T * (g - 2.0 * w_e.cross(v_mid));

    p += (0.5 * T) * (v + v_next);
    v = v_next;
    q = q_earth * q * from_rotation_vector(phi);
    if (opt.renormalize) q = q.normalized();
  }
  return {state.t + batch.t_span(), q, v, p};
}

}  // namespace inavm::ref
