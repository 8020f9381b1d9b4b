#include "inavm/navigator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "inavm/earth.hpp"

namespace inavm {

namespace {

// Iteration workspaces live on the stack; degrees above kMaxDegree are rejected.
// The default degree (9) also gets a fixed-size instantiation, which lets the
// compiler unroll and vectorize the 10x10 products.
constexpr int kMaxDegree = 31;
constexpr int kFixedRows = 10;

template <int R, int C>
using Blk = Eigen::Matrix<double, R, C, Eigen::ColMajor, (R == Eigen::Dynamic ? kMaxDegree + 1 : R), C>;

template <int R>
using Square = Eigen::Matrix<double, R, R>;

constexpr double kEps = std::numeric_limits<double>::epsilon();

template <typename A, typename B>
double rms_delta(const A& prev, const B& next) {
  return std::sqrt((next - prev).squaredNorm() / static_cast<double>(next.rows()));
}

template <typename T>
bool settled(double e, const T& table, const IterationConfig& cfg) {
  if (e < cfg.tol) return true;
  return cfg.noise_ulps > 0.0 && e <= cfg.noise_ulps * kEps * table.cwiseAbs().maxCoeff();
}

// Loop operators as R x R matrices (R = M + 1).
template <int R>
struct LoopOps {
  Square<R> F, Cs, Cd;
  Eigen::VectorXd roots;
  int M;
  explicit LoopOps(const SpectralOperators& ops) : F(ops.F), Cs(ops.Cs), Cd(ops.Cd), roots(ops.roots), M(ops.M) {}
};

const LoopOps<kFixedRows>& fixed_ops() {
  static const LoopOps<kFixedRows> ops(operators_for(kFixedRows - 1));
  return ops;
}

// Series values at the roots of ops.
template <int R, int C, typename Ops, typename Coeffs>
Blk<R, C> root_values(const Coeffs& coeffs, const Ops& ops) {
  const int n = ops.M + 1;
  Blk<R, C> out(n, C);
  if (coeffs.rows() == n) {
    out.noalias() = ops.F.lazyProduct(coeffs);
  } else if (coeffs.rows() < n) {
    Blk<R, C> c = Blk<R, C>::Zero(n, C);
    c.topRows(coeffs.rows()) = coeffs;
    out.noalias() = ops.F.lazyProduct(c);
  } else {
    const Table t = coeffs;
    for (int k = 0; k <= ops.M; ++k) out.row(k) = cheb::eval(t, ops.roots[k]).transpose();
  }
  return out;
}

// rho = Cd s using the band structure of Cd = U D: dense row 0, then row 1
// touching columns 0 and 2, then row r touching columns r-1 and r+1.
template <typename Sq, typename In, typename Out>
void apply_cd(const Sq& cd, const In& s, Out& rho) {
  const int n = static_cast<int>(s.rows());
  rho.row(0).noalias() = cd.row(0) * s;
  rho.row(1) = cd(1, 0) * s.row(0) + cd(1, 2) * s.row(2);
  for (int r = 2; r < n - 1; ++r) rho.row(r) = cd(r, r - 1) * s.row(r - 1) + cd(r, r + 1) * s.row(r + 1);
  rho.row(n - 1) = cd(n - 1, n - 2) * s.row(n - 2);
}

template <typename M>
Table to_table(const M& m) {
  return Table(m);
}

void check_span(double span) {
  if (!(span > 0.0) || !std::isfinite(span)) throw std::invalid_argument("interval length must be positive");
}

}  // namespace

void IterationConfig::validate() const {
  if (m_q < 2 || m_v < 2 || m_p < 2) throw std::invalid_argument("IterationConfig: degrees must be >= 2");
  if (m_q > kMaxDegree || m_v > kMaxDegree) {
    throw std::invalid_argument("IterationConfig: degrees above " + std::to_string(kMaxDegree) + " unsupported");
  }
  if (m_p != m_v) throw std::invalid_argument("IterationConfig: m_p must equal m_v");
  if (!(tol > 0.0)) throw std::invalid_argument("IterationConfig: tol must be positive");
  if (max_iters < 1) throw std::invalid_argument("IterationConfig: max_iters must be >= 1");
  if (noise_ulps < 0.0) throw std::invalid_argument("IterationConfig: noise_ulps must be >= 0");
}

Vec3 IterationConfig::earth_rate() const { return earth_rotation ? earth::earth_rate_e() : Vec3::Zero(); }

double rms_coeff_delta(const Table& prev, const Table& next) {
  if (prev.rows() != next.rows() || prev.cols() != next.cols()) {
    throw std::invalid_argument("rms_coeff_delta: shape mismatch");
  }
  return rms_delta(prev, next);
}

namespace {

template <int R, typename Ops, typename Coeffs>
AttitudeResult attitude_kernel(const Quaternion& q0, const Coeffs& w_coeffs, double span, const Vec3& w_e,
                               const IterationConfig& cfg, const Ops& ops) {
  const int n = ops.M + 1;
  const Blk<R, 3> W = root_values<R, 3>(w_coeffs, ops);

  // t_N/4 from the time map and 1/2 of the quaternion kinematics, times the
  // 2/(M+1) of the discrete transform: t_N / (2 (M+1)).
  const double gain = (0.25 * span) * (2.0 / n);

  const Vec4 q0v = q0.vec4();
  Blk<R, 4> Q(n, 4), R_(n, 4), b(n, 4), b_prev(n, 4);
  Q.rowwise() = q0v.transpose();
  b_prev.setZero();
  b_prev.row(0) = q0v.transpose();

  // Row k of R is q o w - w_e o q = [-eta.(w - w_e), s (w - w_e) + eta x (w + w_e)],
  // evaluated column-wise with D = W - w_e and S = W + w_e fixed across passes.
  Blk<R, 3> D(n, 3), S(n, 3);
  for (int c = 0; c < 3; ++c) {
    D.col(c) = W.col(c).array() - w_e[c];
    S.col(c) = W.col(c).array() + w_e[c];
  }

  LoopDiagnostics diag;
  for (int l = 0; l < cfg.max_iters; ++l) {
    const auto q0c = Q.col(0).array();
    const auto q1c = Q.col(1).array();
    const auto q2c = Q.col(2).array();
    const auto q3c = Q.col(3).array();
    R_.col(0) = -(q1c * D.col(0).array() + q2c * D.col(1).array() + q3c * D.col(2).array());
    R_.col(1) = q0c * D.col(0).array() + (q2c * S.col(2).array() - q3c * S.col(1).array());
    R_.col(2) = q0c * D.col(1).array() + (q3c * S.col(0).array() - q1c * S.col(2).array());
    R_.col(3) = q0c * D.col(2).array() + (q1c * S.col(1).array() - q2c * S.col(0).array());

    b.noalias() = ops.Cs.lazyProduct(R_);
    b *= gain;
    b.row(0) += q0v.transpose();

    diag.iterations = l + 1;
    diag.residual = rms_delta(b_prev, b);
    // Any non-finite coefficient makes the residual non-finite.
    if (!std::isfinite(diag.residual)) {
      throw NavError("attitude_iterate: non-finite coefficients at pass " + std::to_string(l + 1));
    }
    if (settled(diag.residual, b, cfg)) {
      diag.converged = true;
      break;
    }
    Q.noalias() = ops.F.lazyProduct(b);
    b_prev = b;
  }
  return {ChebSeries{to_table(b), span}, diag};
}

}  // namespace

AttitudeResult attitude_iterate(const Quaternion& q0, const ChebSeries& w_series, const Vec3& w_e,
                                const IterationConfig& cfg, const SpectralOperators& ops) {
  cfg.validate();
  if (ops.M != cfg.m_q) throw std::invalid_argument("attitude_iterate: operators built for wrong degree");
  check_span(w_series.t_span);
  const double span = w_series.t_span;
  if (ops.M + 1 == kFixedRows) return attitude_kernel<kFixedRows>(q0, w_series.coeffs, span, w_e, cfg, fixed_ops());
  return attitude_kernel<Eigen::Dynamic>(q0, w_series.coeffs, span, w_e, cfg, LoopOps<Eigen::Dynamic>(ops));
}

namespace {

template <int R, typename Ops, typename Coeffs>
VelPosResult velpos_kernel(const Vec3& v0, const Vec3& p0, const Table& q_coeffs, const Coeffs& f_coeffs,
                           double span, const Vec3& w_e, const IterationConfig& cfg, const Ops& ops) {
  const int n = ops.M + 1;
  const Blk<R, 4> Qr = root_values<R, 4>(q_coeffs, ops);
  const Blk<R, 3> Fr = root_values<R, 3>(f_coeffs, ops);

  // Specific force in ECEF at the roots; fixed while velocity and position iterate.
  // q o f o q^* = (s^2 - |eta|^2) f + 2 (eta.f) eta + 2 s (eta x f), column-wise.
  Blk<R, 3> A(n, 3);
  {
    const auto qs = Qr.col(0).array();
    const auto qx = Qr.col(1).array();
    const auto qy = Qr.col(2).array();
    const auto qz = Qr.col(3).array();
    const auto fx = Fr.col(0).array();
    const auto fy = Fr.col(1).array();
    const auto fz = Fr.col(2).array();
    const Eigen::Array<double, R, 1, 0, (R == Eigen::Dynamic ? kMaxDegree + 1 : R), 1> c0 =
        qs * qs - (qx * qx + qy * qy + qz * qz);
    const Eigen::Array<double, R, 1, 0, (R == Eigen::Dynamic ? kMaxDegree + 1 : R), 1> dot2 =
        2.0 * (qx * fx + qy * fy + qz * fz);
    A.col(0) = c0 * fx + dot2 * qx + 2.0 * qs * (qy * fz - qz * fy);
    A.col(1) = c0 * fy + dot2 * qy + 2.0 * qs * (qz * fx - qx * fz);
    A.col(2) = c0 * fz + dot2 * qz + 2.0 * qs * (qx * fy - qy * fx);
  }

  const double gain_v = (0.5 * span) * (2.0 / n);  // t_N / (M+1)
  const double gain_p = 0.5 * span;

  Blk<R, 3> V(n, 3), P(n, 3), Y(n, 3), G = Blk<R, 3>::Zero(n, 3), s(n, 3), rho(n, 3), s_prev(n, 3), rho_prev(n, 3);
  V.rowwise() = v0.transpose();
  P.rowwise() = p0.transpose();
  s_prev.setZero();
  s_prev.row(0) = v0.transpose();
  rho_prev.setZero();
  rho_prev.row(0) = p0.transpose();

  VelPosResult out;
  LoopDiagnostics& diag = out.diag;
  for (int l = 0; l < cfg.max_iters; ++l) {
    if (cfg.gravity && l == 0) {
      // P is the constant p0 on the first pass.
      try {
        G.rowwise() = earth::gravity_e(p0).transpose();
      } catch (const std::domain_error& e) {
        throw NavError(std::string("velpos_iterate: gravity evaluation failed at pass 1: ") + e.what());
      }
    } else if (cfg.gravity) {
      try {
        earth::gravity_e_batch(n, P.col(0).data(), P.col(1).data(), P.col(2).data(), G.col(0).data(),
                               G.col(1).data(), G.col(2).data());
      } catch (const std::domain_error& e) {
        throw NavError(std::string("velpos_iterate: gravity evaluation failed at pass ") + std::to_string(l + 1) +
                       ": " + e.what());
      }
    }
    // Y = A - 2 w_e x V + G, with w_e x v written out column by column.
    Y.col(0) = A.col(0) - 2.0 * (w_e.y() * V.col(2) - w_e.z() * V.col(1)) + G.col(0);
    Y.col(1) = A.col(1) - 2.0 * (w_e.z() * V.col(0) - w_e.x() * V.col(2)) + G.col(1);
    Y.col(2) = A.col(2) - 2.0 * (w_e.x() * V.col(1) - w_e.y() * V.col(0)) + G.col(2);
    s.noalias() = ops.Cs.lazyProduct(Y);
    s *= gain_v;
    s.row(0) += v0.transpose();
    apply_cd(ops.Cd, s, rho);
    rho *= gain_p;
    rho.row(0) += p0.transpose();

    diag.iterations = l + 1;
    out.e_v = rms_delta(s_prev, s);
    out.e_p = rms_delta(rho_prev, rho);
    diag.residual = std::max(out.e_v, out.e_p);
    if (!std::isfinite(diag.residual)) {
      throw NavError("velpos_iterate: non-finite coefficients at pass " + std::to_string(l + 1));
    }
    if (settled(out.e_v, s, cfg) && settled(out.e_p, rho, cfg)) {
      diag.converged = true;
      break;
    }
    V.noalias() = ops.F.lazyProduct(s);
    P.noalias() = ops.F.lazyProduct(rho);
    s_prev = s;
    rho_prev = rho;
  }
  out.v_series = ChebSeries{to_table(s), span};
  out.p_series = ChebSeries{to_table(rho), span};
  return out;
}

}  // namespace

VelPosResult velpos_iterate(const Vec3& v0, const Vec3& p0, const ChebSeries& q_series, const ChebSeries& f_series,
                            const Vec3& w_e, const IterationConfig& cfg, const SpectralOperators& ops) {
  cfg.validate();
  if (ops.M != cfg.m_v) throw std::invalid_argument("velpos_iterate: operators built for wrong degree");
  const double span = f_series.t_span;
  check_span(span);
  if (std::abs(q_series.t_span - span) > 1e-12 * span) {
    throw std::invalid_argument("velpos_iterate: attitude and force series cover different intervals");
  }
  if (ops.M + 1 == kFixedRows) {
    return velpos_kernel<kFixedRows>(v0, p0, q_series.coeffs, f_series.coeffs, span, w_e, cfg, fixed_ops());
  }
  return velpos_kernel<Eigen::Dynamic>(v0, p0, q_series.coeffs, f_series.coeffs, span, w_e, cfg,
                                       LoopOps<Eigen::Dynamic>(ops));
}

namespace {
int resolve_degree(int requested, int n_samples) { return requested < 0 ? n_samples - 1 : requested; }
}  // namespace

Navigator::Navigator(const IterationConfig& cfg, int samples_per_interval)
    : cfg_(cfg),
      n_samples_(samples_per_interval),
      att_ops_(nullptr),
      vp_ops_(nullptr),
      w_fit_(samples_per_interval, resolve_degree(cfg.n_w, samples_per_interval)),
      f_fit_(samples_per_interval, resolve_degree(cfg.n_f, samples_per_interval)) {
  cfg_.validate();
  att_ops_ = &operators_for(cfg_.m_q);
  vp_ops_ = &operators_for(cfg_.m_v);
}

namespace {

template <typename WC, typename FC>
StepResult solve_interval(const NavState& state, const WC& w_coeffs, const FC& f_coeffs, double span,
                          const IterationConfig& cfg, const SpectralOperators& att_ops,
                          const SpectralOperators& vp_ops) {
  const Vec3 w_e = cfg.earth_rate();
  AttitudeResult att = att_ops.M + 1 == kFixedRows
                           ? attitude_kernel<kFixedRows>(state.q, w_coeffs, span, w_e, cfg, fixed_ops())
                           : attitude_kernel<Eigen::Dynamic>(state.q, w_coeffs, span, w_e, cfg,
                                                             LoopOps<Eigen::Dynamic>(att_ops));
  VelPosResult vp = vp_ops.M + 1 == kFixedRows
                        ? velpos_kernel<kFixedRows>(state.v_e, state.p_e, att.q_series.coeffs, f_coeffs, span, w_e,
                                                    cfg, fixed_ops())
                        : velpos_kernel<Eigen::Dynamic>(state.v_e, state.p_e, att.q_series.coeffs, f_coeffs, span,
                                                        w_e, cfg, LoopOps<Eigen::Dynamic>(vp_ops));

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

  NavState& next = out.state;
  next.t = state.t + span;
  // series at tau = 1 is the column sum; fixed-size targets avoid temporaries
  next.q = Quaternion::from_vec4(Vec4(sol.q_series.coeffs.colwise().sum().transpose()));
  if (cfg.renormalize) next.q = next.q.normalized();
  next.v_e = sol.v_series.coeffs.colwise().sum().transpose();
  next.p_e = sol.p_series.coeffs.colwise().sum().transpose();
  return out;
}

}  // namespace

StepResult Navigator::step(const NavState& state, const ImuBatch& batch) const {
  batch.validate();
  if (batch.size() != n_samples_) {
    throw std::invalid_argument("Navigator::step: batch has " + std::to_string(batch.size()) + " samples, expected " +
                                std::to_string(n_samples_));
  }
  const double span = batch.t_span();
  check_span(span);
  if (w_fit_.degree() > imu::kMaxFitDegree || f_fit_.degree() > imu::kMaxFitDegree) {
    return solve_interval(state, w_fit_.fit(batch.dtheta, span), f_fit_.fit(batch.dv, span), span, cfg_, *att_ops_,
                          *vp_ops_);
  }
  imu::FitBlock w_coeffs, f_coeffs;
  w_fit_.fit(batch.dtheta, span, w_coeffs);
  f_fit_.fit(batch.dv, span, f_coeffs);
  return solve_interval(state, w_coeffs, f_coeffs, span, cfg_, *att_ops_, *vp_ops_);
}

std::pair<NavState, IntervalSolution> step(const NavState& state, const ImuBatch& batch, const IterationConfig& cfg) {
  const Navigator nav(cfg, batch.size());
  StepResult r = nav.step(state, batch);
  return {r.state, std::move(r.solution)};
}

}  // namespace inavm
