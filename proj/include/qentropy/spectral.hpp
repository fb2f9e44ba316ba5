#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "qentropy/error.hpp"
#include "qentropy/matrix.hpp"

namespace qentropy {

/// Eigenvalues ascending; column k of `vectors` belongs to `values[k]`.
struct Spectrum {
  std::vector<double> values;
  Matrix vectors;

  std::size_t dim() const noexcept { return values.size(); }
};

struct JacobiOptions {
  int max_sweeps = 100;
  /// Stop once the off-diagonal Frobenius norm drops to this fraction of ||A||_F.
  double relative_threshold = 1e-13;
};

namespace detail {

inline double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// One complex Jacobi rotation annihilating a(p, q). The phase of a(p, q) is first
// absorbed into column q, leaving a real symmetric 2x2 block that the classical
// rotation diagonalizes. U = [[c, s], [-s e^{-i phi}, c e^{-i phi}]].
inline void jacobi_rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const Complex apq = a(p, q);
  const double g = std::abs(apq);
  if (g == 0.0) return;
  const Complex phase = std::conj(apq / g);

  const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * g);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const Complex u00 = c, u01 = s;
  const Complex u10 = -s * phase, u11 = c * phase;
  const std::size_t n = a.rows();

  for (std::size_t k = 0; k < n; ++k) {
    const Complex akp = a(k, p), akq = a(k, q);
    a(k, p) = akp * u00 + akq * u10;
    a(k, q) = akp * u01 + akq * u11;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Complex apk = a(p, k), aqk = a(q, k);
    a(p, k) = std::conj(u00) * apk + std::conj(u10) * aqk;
    a(q, k) = std::conj(u01) * apk + std::conj(u11) * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();

  for (std::size_t k = 0; k < n; ++k) {
    const Complex vkp = v(k, p), vkq = v(k, q);
    v(k, p) = vkp * u00 + vkq * u10;
    v(k, q) = vkp * u01 + vkq * u11;
  }
}

}  // namespace detail

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// Row-cyclic sweeps over all (p, q), p < q, until the off-diagonal Frobenius norm is at
/// most `relative_threshold * ||A||_F`. Throws ErrorKind::NotConverged after
/// `max_sweeps` sweeps. Deterministic: no pivot search, fixed sweep order.
inline Spectrum hermitian_eig(const HermitianMatrix& h, const JacobiOptions& options = {}) {
  const std::size_t n = h.dim();
  Matrix a = h.matrix();
  Matrix v = Matrix::identity(n);

  const double threshold = options.relative_threshold * a.frobenius_norm();
  for (int sweep = 0;; ++sweep) {
    const double off = detail::off_diagonal_norm(a);
    if (off <= threshold) break;
    if (sweep == options.max_sweeps) {
      std::ostringstream os;
      os << "Jacobi eigensolver did not converge in " << options.max_sweeps
         << " sweeps (off-diagonal norm " << off << ")";
      throw Error(ErrorKind::NotConverged, os.str(), off);
    }
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) detail::jacobi_rotate(a, v, p, q);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  Spectrum out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

/// V diag(values) V^dagger.
inline HermitianMatrix from_spectrum(std::span<const double> values, const Matrix& vectors) {
  const std::size_t n = values.size();
  Matrix scaled = vectors;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) scaled(i, k) *= values[k];
  return HermitianMatrix::hermitian_part(scaled * vectors.adjoint());
}

/// Eigenvalues in (-kPsdTolerance, 0) are treated as numerical drift and clamped to 0.
inline constexpr double kPsdTolerance = 1e-10;
/// Default support floor: eigenvalues at or below it are outside the support.
inline constexpr double kSupportFloor = 1e-12;

/// Spectral functions. Every function except exp follows the support convention:
/// eigenvalues <= floor are mapped to 0 (for power with p > 0 this agrees with the
/// ordinary value up to floor^p). Negative eigenvalues beyond -kPsdTolerance are
/// outside the domain of everything but exp.
struct MatrixFunction {
  enum class Kind { Sqrt, LogOnSupport, Exp, Power, PowerOnSupport };
  Kind kind = Kind::Sqrt;
  double exponent = 1.0;

  static MatrixFunction sqrt() { return {Kind::Sqrt, 0.5}; }
  static MatrixFunction log_on_support() { return {Kind::LogOnSupport, 0.0}; }
  static MatrixFunction exp() { return {Kind::Exp, 0.0}; }
  /// Strict power: for p <= 0 every eigenvalue must exceed the floor.
  static MatrixFunction power(double p) { return {Kind::Power, p}; }
  /// Power restricted to the support; p < 0 gives the generalized (Moore-Penrose style) inverse power.
  static MatrixFunction power_on_support(double p) { return {Kind::PowerOnSupport, p}; }
};

inline double apply_scalar(const MatrixFunction& fn, double lambda, double floor) {
  using Kind = MatrixFunction::Kind;
  if (fn.kind == Kind::Exp) return std::exp(lambda);
  if (lambda < -kPsdTolerance) {
    std::ostringstream os;
    os << "spectral function undefined for negative eigenvalue " << lambda;
    throw Error(ErrorKind::Domain, os.str(), -lambda);
  }
  const bool on_support = lambda > floor;
  switch (fn.kind) {
    case Kind::Sqrt:
      return on_support ? std::sqrt(lambda) : 0.0;
    case Kind::LogOnSupport:
      return on_support ? std::log(lambda) : 0.0;
    case Kind::Power:
      if (!on_support) {
        if (fn.exponent <= 0.0) {
          std::ostringstream os;
          os << "power(" << fn.exponent << ") of a singular matrix (eigenvalue " << lambda << ")";
          throw Error(ErrorKind::Domain, os.str(), lambda);
        }
        return 0.0;
      }
      return std::pow(lambda, fn.exponent);
    case Kind::PowerOnSupport:
      return on_support ? std::pow(lambda, fn.exponent) : 0.0;
    case Kind::Exp:
      break;
  }
  return 0.0;
}

inline HermitianMatrix matrix_fn(const Spectrum& spectrum, const MatrixFunction& fn,
                                 double floor = kSupportFloor) {
  std::vector<double> mapped(spectrum.values.size());
  for (std::size_t k = 0; k < mapped.size(); ++k) mapped[k] = apply_scalar(fn, spectrum.values[k], floor);
  return from_spectrum(mapped, spectrum.vectors);
}

inline HermitianMatrix matrix_fn(const HermitianMatrix& a, const MatrixFunction& fn,
                                 double floor = kSupportFloor) {
  return matrix_fn(hermitian_eig(a), fn, floor);
}

inline HermitianMatrix sqrtm(const HermitianMatrix& a) { return matrix_fn(a, MatrixFunction::sqrt()); }
inline HermitianMatrix logm(const HermitianMatrix& a) { return matrix_fn(a, MatrixFunction::log_on_support()); }
inline HermitianMatrix expm(const HermitianMatrix& a) { return matrix_fn(a, MatrixFunction::exp()); }

/// Tr|A| = sum of |eigenvalues|.
inline double trace_norm(const HermitianMatrix& a) {
  double s = 0.0;
  for (double lambda : hermitian_eig(a).values) s += std::abs(lambda);
  return s;
}

/// Integral over t in [0, inf) of 1 / ((t + a)(t + b)) = ln(a/b) / (a - b), with the
/// removable singularity at a = b replaced by its limit, evaluated as 2/(a + b).
inline double resolvent_integral_kernel(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    std::ostringstream os;
    os << "resolvent kernel needs positive arguments, got (" << a << ", " << b << ")";
    throw Error(ErrorKind::Domain, os.str(), std::min(a, b));
  }
  const double hi = std::max(a, b), lo = std::min(a, b);
  if (hi - lo <= 1e-12 * hi) return 2.0 / (a + b);
  // Ordered arguments keep the kernel symmetric to the last bit. log1p covers
  // ratios near 1, the plain log ratio covers widely separated arguments.
  const double diff = hi - lo;
  const double num = hi < 2.0 * lo ? std::log1p(diff / lo) : std::log(hi / lo);
  return num / diff;
}

}  // namespace qentropy
