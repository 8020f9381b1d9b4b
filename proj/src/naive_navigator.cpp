#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "inavm/earth.hpp"
#include "inavm/reference.hpp"

namespace inavm::ref {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool settled(double e, const Table& table, const IterationConfig& cfg) {
  if (e < cfg.tol) return true;
  return cfg.noise_ulps > 0.0 && e <= cfg.noise_ulps * kEps * table.cwiseAbs().maxCoeff();
}

// acc += weight * int_{-1}^{tau} F_n, expanded in Chebyshev coefficients.
template <typename Row>
void add_integral(Table& acc, int n, const Row& value, double weight = 1.0) {
  const cheb::IndefTerms t = cheb::indefint_terms(n);
  for (int k = 0; k < t.count; ++k) acc.row(t.degree[k]) += (weight * t.weight[k]) * value;
}

Eigen::RowVector4d row4(const Quaternion& q) { return {q.s, q.eta.x(), q.eta.y(), q.eta.z()}; }
Quaternion quat_row(const Table& t, int i) { return {t(i, 0), t(i, 1), t(i, 2), t(i, 3)}; }
Vec3 vec_row(const Table& t, int i) { return {t(i, 0), t(i, 1), t(i, 2)}; }

}  // namespace

AttitudeResult naive_attitude_iterate(const Quaternion& q0, const ChebSeries& w_series, const Vec3& w_e,
                                      const IterationConfig& cfg) {
  cfg.validate();
  const double span = w_series.t_span;
  if (!(span > 0.0)) throw std::invalid_argument("naive_attitude_iterate: interval length must be positive");
  const TruncationPolicy trunc{cfg.m_q, cfg.m_v, cfg.m_p};
  const int mq = cfg.m_q;
  const int nw = w_series.max_degree();
  const Table& c = w_series.coeffs;

  Table b = Table::Zero(mq + 1, 4);
  b.row(0) = row4(q0);
  Table acc(trunc.raw_attitude_degree(nw) + 1, 4);

  LoopDiagnostics diag;
  for (int l = 0; l < cfg.max_iters; ++l) {
    acc.setZero();
    for (int i = 0; i <= mq; ++i) {
      const Quaternion bi = quat_row(b, i);
      for (int j = 0; j <= nw; ++j) {
        const Eigen::RowVector4d p = row4(quat_mul(bi, vec_row(c, j)));
        add_integral(acc, i + j, p);
        add_integral(acc, std::abs(i - j), p);
      }
      add_integral(acc, i, row4(quat_mul(w_e, bi)), -2.0);
    }
    acc *= span / 8.0;
    acc.row(0) += row4(q0);
    if (!acc.allFinite()) {
      throw NavError("naive_attitude_iterate: non-finite coefficients at pass " + std::to_string(l + 1));
    }

    const Table next = acc.topRows(mq + 1);
    diag.iterations = l + 1;
    diag.residual = rms_coeff_delta(b, next);
    b = next;
    if (settled(diag.residual, b, cfg)) {
      diag.converged = true;
      break;
    }
  }
  return {ChebSeries{std::move(b), span}, diag};
}

VelPosResult naive_velpos_iterate(const Vec3& v0, const Vec3& p0, const ChebSeries& q_series,
                                  const ChebSeries& f_series, const Vec3& w_e, const IterationConfig& cfg) {
  cfg.validate();
  const double span = f_series.t_span;
  if (!(span > 0.0)) throw std::invalid_argument("naive_velpos_iterate: interval length must be positive");
  const TruncationPolicy trunc{cfg.m_q, cfg.m_v, cfg.m_p};
  const int mq = q_series.max_degree();
  const int nf = f_series.max_degree();
  const int mv = cfg.m_v;
  const int mp = cfg.m_p;
  const Table& b = q_series.coeffs;
  const Table& d = f_series.coeffs;

  // I_f = int q o f o q^*: the attitude is fixed here, so the triple sum is
  // expanded once.
  const int raw_v = std::max(trunc.raw_velocity_degree(nf), 2 * mq + nf + 1);
  Table i_f = Table::Zero(raw_v + 1, 3);
  for (int i = 0; i <= mq; ++i) {
    const Quaternion bi = quat_row(b, i);
    for (int j = 0; j <= nf; ++j) {
      const Quaternion bd = quat_mul(bi, vec_row(d, j));
      for (int k = 0; k <= mq; ++k) {
        const Eigen::RowVector3d t = (bd * conj(quat_row(b, k))).eta.transpose();
        add_integral(i_f, i + j + k, t, 0.25);
        add_integral(i_f, std::abs(i + j - k), t, 0.25);
        add_integral(i_f, std::abs(i - j) + k, t, 0.25);
        add_integral(i_f, std::abs(std::abs(i - j) - k), t, 0.25);
      }
    }
  }

  const Eigen::VectorXd roots = cheb::roots(mv);
  Table s = Table::Zero(mv + 1, 3);
  s.row(0) = v0.transpose();
  Table rho = Table::Zero(mp + 1, 3);
  rho.row(0) = p0.transpose();
  Table acc(raw_v + 1, 3);
  Table acc_p(trunc.raw_position_degree() + 1, 3);
  Table g_roots(mv + 1, 3);

  VelPosResult out;
  LoopDiagnostics& diag = out.diag;
  for (int l = 0; l < cfg.max_iters; ++l) {
    acc = i_f;
    for (int i = 0; i <= mv; ++i) add_integral(acc, i, w_e.cross(vec_row(s, i)).transpose(), -2.0);
    if (cfg.gravity) {
      for (int k = 0; k <= mv; ++k) {
        const Eigen::VectorXd p = cheb::eval(rho, roots[k]);
        try {
          g_roots.row(k) = earth::gravity_e(Vec3(p[0], p[1], p[2])).transpose();
        } catch (const std::domain_error& e) {
          throw NavError(std::string("naive_velpos_iterate: gravity evaluation failed: ") + e.what());
        }
      }
      const Table gamma = coeffs_from_samples(g_roots, mv);
      for (int i = 0; i <= mv; ++i) add_integral(acc, i, gamma.row(i));
    }
    acc *= 0.5 * span;
    acc.row(0) += v0.transpose();

    // Position integrates the previous pass's velocity.
    acc_p.setZero();
    for (int i = 0; i <= mv; ++i) add_integral(acc_p, i, s.row(i));
    acc_p *= 0.5 * span;
    acc_p.row(0) += p0.transpose();

    const Table s_next = acc.topRows(mv + 1);
    const Table rho_next = acc_p.topRows(mp + 1);
    if (!s_next.allFinite() || !rho_next.allFinite()) {
      throw NavError("naive_velpos_iterate: non-finite coefficients at pass " + std::to_string(l + 1));
    }
    diag.iterations = l + 1;
    out.e_v = rms_coeff_delta(s, s_next);
    out.e_p = rms_coeff_delta(rho, rho_next);
    diag.residual = std::max(out.e_v, out.e_p);
    s = s_next;
    rho = rho_next;
    if (settled(out.e_v, s, cfg) && settled(out.e_p, rho, cfg)) {
      diag.converged = true;
      break;
    }
  }
  out.v_series = ChebSeries{std::move(s), span};
  out.p_series = ChebSeries{std::move(rho), span};
  return out;
}

NaiveNavigator::NaiveNavigator(const IterationConfig& cfg, int samples_per_interval)
    : cfg_(cfg),
      n_samples_(samples_per_interval),
      w_fit_(samples_per_interval, cfg.n_w < 0 ? samples_per_interval - 1 : cfg.n_w),
      f_fit_(samples_per_interval, cfg.n_f < 0 ? samples_per_interval - 1 : cfg.n_f) {
  cfg_.validate();
}

StepResult NaiveNavigator::step(const NavState& state, const ImuBatch& batch) const {
  batch.validate();
  if (batch.size() != n_samples_) {
    throw std::invalid_argument("NaiveNavigator::step: batch has " + std::to_string(batch.size()) +
                                " samples, expected " + std::to_string(n_samples_));
  }
  const double span = batch.t_span();
  const Vec3 w_e = cfg_.earth_rate();
  const ChebSeries w_series{w_fit_.fit(batch.dtheta, span), span};
  const ChebSeries f_series{f_fit_.fit(batch.dv, span), span};

  AttitudeResult att = naive_attitude_iterate(state.q, w_series, w_e, cfg_);
  VelPosResult vp = naive_velpos_iterate(state.v_e, state.p_e, att.q_series, f_series, w_e, cfg_);

  StepResult out;
  IntervalSolution& sol = out.solution;
  sol.q_series = std::move(att.q_series);
  sol.v_series = std::move(vp.v_series);
  sol.p_series = std::move(vp.p_series);
  sol.attitude = att.diag;
  sol.velpos = vp.diag;
  sol.e_q = att.diag.residual;
  sol.e_v = vp.e_v;
  sol.e_p = vp.e_p;

  out.state.t = state.t + span;
  out.state.q = Quaternion::from_vec4(sol.q_series.at_end());
  if (cfg_.renormalize) out.state.q = out.state.q.normalized();
  out.state.v_e = sol.v_series.at_end();
  out.state.p_e = sol.p_series.at_end();
  return out;
}

}  // namespace inavm::ref
