#include "inavm/imu_fit.hpp"

#include <stdexcept>
#include <string>

namespace inavm {

void ImuBatch::validate() const {
  if (dtheta.size() != dv.size()) throw std::invalid_argument("ImuBatch: dtheta/dv length mismatch");
  if (dtheta.size() < 2) throw std::invalid_argument("ImuBatch: need at least 2 samples");
  if (!(dt > 0.0)) throw std::invalid_argument("ImuBatch: dt must be positive");
  for (std::size_t k = 0; k < dtheta.size(); ++k) {
    if (!dtheta[k].allFinite() || !dv[k].allFinite()) {
      throw std::invalid_argument("ImuBatch: non-finite increment at sample " + std::to_string(k));
    }
  }
}

namespace imu {

namespace {

Table solve_pinv(const Table& A) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < A.cols()) throw std::runtime_error("imu fit: design matrix is rank deficient");
  return qr.solve(Eigen::MatrixXd::Identity(A.rows(), A.rows()));
}

Table stack(std::span<const Vec3> v) {
  Table m(static_cast<Eigen::Index>(v.size()), 3);
  for (std::size_t k = 0; k < v.size(); ++k) m.row(static_cast<Eigen::Index>(k)) = v[k].transpose();
  return m;
}

}  // namespace

IncrementFitter::IncrementFitter(int n_samples, int degree) : n_samples_(n_samples), degree_(degree) {
  if (n_samples < 2) throw std::invalid_argument("IncrementFitter: need N >= 2");
  if (degree < 0 || degree > n_samples - 1) {
    throw std::invalid_argument("IncrementFitter: degree must satisfy 0 <= n <= N - 1");
  }
  Table A(n_samples, degree + 1);
  for (int k = 1; k <= n_samples; ++k) {
    const double lo = -1.0 + 2.0 * (k - 1) / n_samples;
    const double hi = -1.0 + 2.0 * k / n_samples;
    for (int i = 0; i <= degree; ++i) A(k - 1, i) = cheb::defint(i, lo, hi);
  }
  pinv_t_ = solve_pinv(A).transpose();
}

void IncrementFitter::check_count(std::size_t n) const {
  if (static_cast<int>(n) != n_samples_) {
    throw std::invalid_argument("IncrementFitter: expected " + std::to_string(n_samples_) + " increments, got " +
                                std::to_string(n));
  }
}

template <typename Out>
void IncrementFitter::fit_into(std::span<const Vec3> increments, double t_span, Out& out) const {
  check_count(increments.size());
  out.resize(degree_ + 1, 3);
  const double scale = 2.0 / t_span;
  for (int j = 0; j <= degree_; ++j) {
    const double* w = pinv_t_.col(j).data();
    Vec3 acc = w[0] * increments[0];
    for (int k = 1; k < n_samples_; ++k) acc += w[k] * increments[k];
    out.row(j) = scale * acc.transpose();
  }
}

Table IncrementFitter::fit(std::span<const Vec3> increments, double t_span) const {
  Table c;
  fit_into(increments, t_span, c);
  return c;
}

void IncrementFitter::fit(std::span<const Vec3> increments, double t_span, FitBlock& out) const {
  if (degree_ > kMaxFitDegree) throw std::invalid_argument("IncrementFitter: degree too high for a stack block");
  fit_into(increments, t_span, out);
}

std::pair<ChebSeries, ChebSeries> fit_increments(const ImuBatch& batch, int n_w, int n_f) {
  batch.validate();
  const int N = batch.size();
  const double span = batch.t_span();
  const IncrementFitter wf(N, n_w);
  ChebSeries w{wf.fit(batch.dtheta, span), span};
  if (n_f == n_w) return {std::move(w), ChebSeries{wf.fit(batch.dv, span), span}};
  const IncrementFitter ff(N, n_f);
  return {std::move(w), ChebSeries{ff.fit(batch.dv, span), span}};
}

ChebSeries fit_rates(std::span<const Vec3> samples, int degree, double t_span) {
  const int N = static_cast<int>(samples.size());
  if (N < 2) throw std::invalid_argument("fit_rates: need at least 2 samples");
  if (degree < 0 || degree > N - 1) throw std::invalid_argument("fit_rates: degree must satisfy 0 <= n <= N - 1");
  Table A(N, degree + 1);
  for (int k = 1; k <= N; ++k) {
    const double tau = -1.0 + 2.0 * k / N;
    for (int i = 0; i <= degree; ++i) A(k - 1, i) = cheb::value(i, tau);
  }
  const Table y = stack(samples);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < A.cols()) throw std::runtime_error("fit_rates: design matrix is rank deficient");
  return {Table(qr.solve(Eigen::MatrixXd(y))), t_span};
}

}  // namespace imu
}  // namespace inavm
