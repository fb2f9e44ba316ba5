#pragma once

#include <cmath>
#include <limits>
#include <sstream>

#include "qentropy/error.hpp"
#include "qentropy/spectral.hpp"
#include "qentropy/states.hpp"
#include "qentropy/tensor.hpp"

namespace qentropy {

/// Real number or +infinity. Infinity only comes from a support violation
/// (supp rho not contained in supp sigma).
class ExtendedScalar {
 public:
  constexpr explicit ExtendedScalar(double v) : value_(v) {}
  static constexpr ExtendedScalar infinity() { return ExtendedScalar(std::numeric_limits<double>::infinity()); }

  constexpr bool is_infinite() const { return value_ == std::numeric_limits<double>::infinity(); }
  constexpr bool is_finite() const { return !is_infinite(); }
  /// +inf when infinite.
  constexpr double value() const { return value_; }

  /// Finite value; throws on infinity.
  double finite_value() const {
    if (is_infinite()) throw Error(ErrorKind::SupportViolation, "divergence is infinite (support violation)");
    return value_;
  }

 private:
  double value_;
};

/// Eigenvalues at or below this contribute nothing to -lambda ln lambda.
inline constexpr double kEntropyFloor = 1e-15;
/// Weight of a support eigenvector outside supp sigma that counts as a violation.
inline constexpr double kSupportWeightThreshold = 1e-8;

/// S(rho) = -Tr rho ln rho in nats.
inline double von_neumann_entropy(const DensityMatrix& rho) {
  double s = 0.0;
  for (double lambda : rho.spectrum().values)
    if (lambda > kEntropyFloor) s -= lambda * std::log(lambda);
  // An eigenvalue a few ulps above 1 would otherwise give a tiny negative entropy.
  return std::max(s, 0.0);
}

namespace detail {

inline void require_same_dim(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) {
    std::ostringstream os;
    os << "states have different dimensions (" << a.dim() << " vs " << b.dim() << ")";
    throw Error(ErrorKind::ShapeMismatch, os.str());
  }
}

// |<v_i|w_k>|^2 for eigenvectors v of a and w of b.
inline Matrix eigenbasis_overlaps(const Spectrum& a, const Spectrum& b) {
  const Matrix inner = a.vectors.adjoint() * b.vectors;
  Matrix out(inner.rows(), inner.cols());
  for (std::size_t i = 0; i < inner.rows(); ++i)
    for (std::size_t k = 0; k < inner.cols(); ++k) out(i, k) = std::norm(inner(i, k));
  return out;
}

}  // namespace detail

/// D(rho||sigma) = Tr rho (ln rho - ln sigma), logs on the support.
///
/// +infinity when some eigenvector of rho with eigenvalue above the support floor puts
/// weight above 1e-8 outside supp sigma.
inline ExtendedScalar relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  detail::require_same_dim(rho, sigma);
  const auto& lr = rho.spectrum().values;
  const auto& ls = sigma.spectrum().values;
  const Matrix w = detail::eigenbasis_overlaps(rho.spectrum(), sigma.spectrum());

  double d = 0.0;
  for (std::size_t i = 0; i < lr.size(); ++i) {
    if (lr[i] <= kEntropyFloor) continue;
    double outside = 0.0;
    double cross = 0.0;
    for (std::size_t k = 0; k < ls.size(); ++k) {
      if (ls[k] > kSupportFloor) {
        cross += w(i, k).real() * std::log(ls[k]);
      } else {
        outside += w(i, k).real();
      }
    }
    if (lr[i] > kSupportFloor && outside > kSupportWeightThreshold) return ExtendedScalar::infinity();
    d += lr[i] * (std::log(lr[i]) - cross);
  }
  return ExtendedScalar(d);
}

/// Petz-Renyi divergence (alpha - 1)^{-1} ln Tr rho^alpha sigma^{1-alpha}, alpha in (0, 1).
inline ExtendedScalar renyi_divergence(const DensityMatrix& rho, const DensityMatrix& sigma, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    std::ostringstream os;
    os << "Renyi order must lie in (0, 1), got " << alpha;
    throw Error(ErrorKind::Domain, os.str());
  }
  detail::require_same_dim(rho, sigma);
  const auto& lr = rho.spectrum().values;
  const auto& ls = sigma.spectrum().values;
  const Matrix w = detail::eigenbasis_overlaps(rho.spectrum(), sigma.spectrum());
  double q = 0.0;
  for (std::size_t i = 0; i < lr.size(); ++i) {
    if (lr[i] <= kSupportFloor) continue;
    const double a = std::pow(lr[i], alpha);
    for (std::size_t k = 0; k < ls.size(); ++k)
      if (ls[k] > kSupportFloor) q += a * std::pow(ls[k], 1.0 - alpha) * w(i, k).real();
  }
  if (!(q > 0.0)) return ExtendedScalar::infinity();
  return ExtendedScalar(std::log(q) / (alpha - 1.0));
}

/// Tr[sqrt(rho) sqrt(sigma)].
inline double root_overlap(const DensityMatrix& rho, const DensityMatrix& sigma) {
  detail::require_same_dim(rho, sigma);
  const auto a = matrix_fn(rho.spectrum(), MatrixFunction::sqrt());
  const auto b = matrix_fn(sigma.spectrum(), MatrixFunction::sqrt());
  return trace_of_product(a, b).real();
}

/// Tr[(sqrt(rho) - sqrt(sigma))^2]; the overlap identity reads
/// root_overlap = 1 - root_distance_squared / 2.
inline double root_distance_squared(const DensityMatrix& rho, const DensityMatrix& sigma) {
  detail::require_same_dim(rho, sigma);
  const auto diff = matrix_fn(rho.spectrum(), MatrixFunction::sqrt()) -
                    matrix_fn(sigma.spectrum(), MatrixFunction::sqrt());
  return trace_of_product(diff, diff).real();
}

/// ½ Tr|rho - sigma|.
inline double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  detail::require_same_dim(rho, sigma);
  return 0.5 * trace_norm(rho.matrix() - sigma.matrix());
}

/// rho_1 (x) ... (x) rho_N built from the single-site marginals of rho.
inline DensityMatrix product_of_marginals(const DensityMatrix& rho, const TensorShape& shape) {
  shape.require_matches(rho.dim());
  std::vector<DensityMatrix> factors;
  for (std::size_t k = 0; k < shape.size(); ++k) factors.push_back(marginal(rho, shape, {k}));
  return product_state(factors);
}

/// Sum_j S(rho_j) - S(rho).
inline double total_correlation(const DensityMatrix& rho, const TensorShape& shape) {
  if (shape.size() < 2) throw Error(ErrorKind::ShapeMismatch, "total correlation needs at least two subsystems");
  shape.require_matches(rho.dim());
  double s = -von_neumann_entropy(rho);
  for (std::size_t k = 0; k < shape.size(); ++k) s += von_neumann_entropy(marginal(rho, shape, {k}));
  return s;
}

/// S_1 + S_2 - S_12.
inline double mutual_information(const DensityMatrix& rho12, const TensorShape& shape) {
  if (shape.size() != 2) throw Error(ErrorKind::ShapeMismatch, "mutual information needs a bipartite shape");
  return total_correlation(rho12, shape);
}

}  // namespace qentropy
