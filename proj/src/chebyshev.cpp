#include "inavm/chebyshev.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace inavm {

Eigen::VectorXd ChebSeries::eval(double tau) const { return cheb::eval(coeffs, tau); }

namespace cheb {

double value(int i, double tau) {
  if (i == 0) return 1.0;
  double prev = 1.0;
  double cur = tau;
  for (int k = 1; k < i; ++k) {
    const double next = 2.0 * tau * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double value_trig(int i, double tau) { return std::cos(i * std::acos(tau)); }

Eigen::VectorXd roots(int M) {
  if (M < 0) throw std::invalid_argument("cheb::roots: negative degree");
  Eigen::VectorXd r(M + 1);
  for (int k = 0; k <= M; ++k) {
    r[k] = std::cos((k + 0.5) * std::numbers::pi / (M + 1));
  }
  // cos(pi/2) is 6e-17 in floating point; the middle root is exactly zero.
  if (M % 2 == 0) r[M / 2] = 0.0;
  return r;
}

Eigen::VectorXd eval(const Table& coeffs, double tau) {
  if (std::abs(tau) > 1.0 + 1e-12) {
    throw std::domain_error("cheb::eval: tau outside [-1, 1]: " + std::to_string(tau));
  }
  const Eigen::Index n = coeffs.rows();
  Eigen::VectorXd b1 = Eigen::VectorXd::Zero(coeffs.cols());
  Eigen::VectorXd b2 = b1;
  for (Eigen::Index i = n - 1; i >= 1; --i) {
    Eigen::VectorXd b0 = 2.0 * tau * b1 - b2 + coeffs.row(i).transpose();
    b2 = std::move(b1);
    b1 = std::move(b0);
  }
  if (n == 0) return b1;
  return tau * b1 - b2 + coeffs.row(0).transpose();
}

// Antiderivative of F_i that vanishes at tau = 0 up to a constant:
//   i = 1 : tau^2 / 2
//   else  : (i F_{i+1} - (i+1) tau F_i) / (i^2 - 1)
static double antiderivative(int i, double tau) {
  if (i == 1) return 0.5 * tau * tau;
  const double n = i;
  return (n * value(i + 1, tau) - (n + 1.0) * tau * value(i, tau)) / (n * n - 1.0);
}

double defint(int i, double a, double b) {
  if (i < 0) throw std::invalid_argument("cheb::defint: negative degree");
  return antiderivative(i, b) - antiderivative(i, a);
}

IndefTerms indefint_terms(int i) {
  if (i < 0) throw std::invalid_argument("cheb::indefint_terms: negative degree");
  if (i == 0) return {{0, 1, 0}, {1.0, 1.0, 0.0}, 2};
  if (i == 1) return {{0, 2, 0}, {-0.25, 0.25, 0.0}, 2};
  const double n = i;
  const double sign = (i % 2 == 0) ? -1.0 : 1.0;  // (-1)^(i+1)
  return {{0, i + 1, i - 1}, {sign / (n * n - 1.0), 0.5 / (n + 1.0), -0.5 / (n - 1.0)}, 3};
}

Eigen::VectorXd indefint_coeffs(int i, int M) {
  if (i < 0 || i > M) throw std::invalid_argument("cheb::indefint_coeffs: need 0 <= i <= M");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(M + 2);
  const IndefTerms t = indefint_terms(i);
  for (int k = 0; k < t.count; ++k) c[t.degree[k]] += t.weight[k];
  return c;
}

}  // namespace cheb

namespace {

Table collocation_matrix(const Eigen::VectorXd& roots) {
  const Eigen::Index n = roots.size();
  Table F(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) F(k, j) = cheb::value(static_cast<int>(j), roots[k]);
  }
  return F;
}

Table forward_transform(const Table& F) {
  const Eigen::Index n = F.rows();
  Eigen::VectorXd z = Eigen::VectorXd::Ones(n);
  z[0] = 0.5;
  return (2.0 / static_cast<double>(n)) * z.asDiagonal() * F.transpose();
}

}  // namespace

SpectralOperators build_operators(int M) {
  if (M < 2) throw std::invalid_argument("build_operators: degree must be >= 2, got " + std::to_string(M));
  SpectralOperators ops;
  ops.M = M;
  ops.roots = cheb::roots(M);
  ops.F = collocation_matrix(ops.roots);

  ops.Z = Eigen::VectorXd::Ones(M + 1);
  ops.Z[0] = 0.5;

  ops.U.resize(M + 1);
  ops.U[0] = 1.0;
  for (int i = 1; i <= M; ++i) ops.U[i] = 1.0 / (2.0 * i);

  // First row: 1, -1/4, then (-1)^j / ((j-1)^2 - 1) for 1-based column j >= 3.
  // Row 1: [2, 0, -1, 0, ...]. Rows r >= 2: +1 at column r-1, -1 at column r+1.
  ops.D = Table::Zero(M + 1, M + 1);
  ops.D(0, 0) = 1.0;
  ops.D(0, 1) = -0.25;
  for (int c = 2; c <= M; ++c) {
    const int j = c + 1;
    ops.D(0, c) = ((j % 2 == 0) ? 1.0 : -1.0) / static_cast<double>((j - 1) * (j - 1) - 1);
  }
  ops.D(1, 0) = 2.0;
  ops.D(1, 2) = -1.0;
  for (int r = 2; r <= M; ++r) {
    ops.D(r, r - 1) = 1.0;
    if (r + 1 <= M) ops.D(r, r + 1) = -1.0;
  }

  ops.Cd = ops.U.asDiagonal() * ops.D;
  ops.Cs = ops.Cd * ops.Z.asDiagonal() * ops.F.transpose();
  ops.transform = forward_transform(ops.F);
  return ops;
}

const SpectralOperators& operators_for(int M) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<const SpectralOperators>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[M];
  if (!slot) slot = std::make_unique<const SpectralOperators>(build_operators(M));
  return *slot;
}

Table coeffs_from_samples(const Table& values, const SpectralOperators& ops) {
  if (values.rows() != ops.M + 1) throw std::invalid_argument("coeffs_from_samples: row count != M + 1");
  return ops.transform * values;
}

Table coeffs_from_samples(const Table& values, int M) {
  if (M >= 2) return coeffs_from_samples(values, operators_for(M));
  if (values.rows() != M + 1) throw std::invalid_argument("coeffs_from_samples: row count != M + 1");
  return forward_transform(collocation_matrix(cheb::roots(M))) * values;
}

Table samples_from_coeffs(const Table& coeffs, const SpectralOperators& ops) {
  if (coeffs.rows() != ops.M + 1) throw std::invalid_argument("samples_from_coeffs: row count != M + 1");
  return ops.F * coeffs;
}

Table samples_from_coeffs(const Table& coeffs, int M) {
  if (M >= 2) return samples_from_coeffs(coeffs, operators_for(M));
  if (coeffs.rows() != M + 1) throw std::invalid_argument("samples_from_coeffs: row count != M + 1");
  return collocation_matrix(cheb::roots(M)) * coeffs;
}

}  // namespace inavm
