#ifndef INAVM_CHEBYSHEV_HPP
#define INAVM_CHEBYSHEV_HPP

// Chebyshev polynomials of the first kind on [-1, 1] and the constant
// spectral operators used by the Picard iteration.
//
// A series is stored as a row-major table: row i holds the coefficient
// vector of F_i(tau). Physical time maps to tau by t = t_span (1 + tau) / 2.

#include <array>
#include <cstddef>
#include <memory>

#include <Eigen/Dense>

namespace inavm {

using Table = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ChebSeries {
  Table coeffs;         // (M+1) x d
  double t_span = 0.0;  // seconds covered by tau in [-1, 1]

  ChebSeries() = default;
  ChebSeries(Table c, double span) : coeffs(std::move(c)), t_span(span) {}

  int max_degree() const { return static_cast<int>(coeffs.rows()) - 1; }
  int dim() const { return static_cast<int>(coeffs.cols()); }

  Eigen::VectorXd eval(double tau) const;
  Eigen::VectorXd at_end() const { return coeffs.colwise().sum().transpose(); }
};

namespace cheb {

/// F_i(tau) by the three-term recurrence.
double value(int i, double tau);
/// F_i(tau) = cos(i acos(tau)).
double value_trig(int i, double tau);

/// Chebyshev-roots points sigma_k = cos((k + 1/2) pi / (M + 1)), k = 0..M.
Eigen::VectorXd roots(int M);

/// Clenshaw evaluation of sum_i coeffs[i] F_i(tau). Throws std::domain_error
/// for |tau| > 1 + 1e-12.
Eigen::VectorXd eval(const Table& coeffs, double tau);
inline Eigen::VectorXd eval(const ChebSeries& s, double tau) { return eval(s.coeffs, tau); }

/// Definite integral of F_i over [a, b].
double defint(int i, double a, double b);

// Chebyshev expansion of tau -> int_{-1}^{tau} F_i(u) du. It has at most
// three nonzero coefficients; the constant term is always present.
struct IndefTerms {
  std::array<int, 3> degree;
  std::array<double, 3> weight;
  int count;
};
IndefTerms indefint_terms(int i);

/// Dense coefficient vector (length M + 2) of tau -> int_{-1}^{tau} F_i.
Eigen::VectorXd indefint_coeffs(int i, int M);

}  // namespace cheb

// Constant matrices for one maximum degree M. Immutable after construction.
struct SpectralOperators {
  int M = 0;
  Eigen::VectorXd roots;  // sigma_0 > ... > sigma_M
  Table F;                // F(k, j) = F_j(sigma_k)
  Eigen::VectorXd Z;      // diag(1/2, 1, ..., 1)
  Eigen::VectorXd U;      // diag(1, 1/2, 1/4, ..., 1/(2M))
  Table D;
  Table Cs;               // U D Z F^T
  Table Cd;               // U D
  Table transform;        // 2/(M+1) Z F^T : samples at roots -> coefficients
};

/// Builds the operators for degree M >= 2. Throws std::invalid_argument otherwise.
SpectralOperators build_operators(int M);

/// Process-wide cache; returned references stay valid for the program lifetime.
const SpectralOperators& operators_for(int M);

Table coeffs_from_samples(const Table& values, const SpectralOperators& ops);
Table coeffs_from_samples(const Table& values, int M);
Table samples_from_coeffs(const Table& coeffs, const SpectralOperators& ops);
Table samples_from_coeffs(const Table& coeffs, int M);

}  // namespace inavm

#endif  // INAVM_CHEBYSHEV_HPP
