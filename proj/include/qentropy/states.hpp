#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <vector>

#include "qentropy/error.hpp"
#include "qentropy/matrix.hpp"
#include "qentropy/rng.hpp"
#include "qentropy/spectral.hpp"
#include "qentropy/tensor.hpp"

namespace qentropy {

/// A validated state: Hermitian, eigenvalues >= -1e-10, unit trace within 1e-10.
/// Keeps its spectrum, with drift in (-1e-10, 0) clamped to 0.
class DensityMatrix {
 public:
  static constexpr double kTraceTolerance = 1e-10;

  const HermitianMatrix& matrix() const noexcept { return matrix_; }
  const Spectrum& spectrum() const noexcept { return spectrum_; }
  std::size_t dim() const noexcept { return matrix_.dim(); }
  double min_eigenvalue() const { return spectrum_.values.front(); }

  /// Number of eigenvalues above `floor`.
  std::size_t rank(double floor = kSupportFloor) const {
    std::size_t r = 0;
    for (double v : spectrum_.values) r += v > floor ? 1 : 0;
    return r;
  }

  friend DensityMatrix validate_density(const Matrix& m);

 private:
  DensityMatrix(HermitianMatrix m, Spectrum s) : matrix_(std::move(m)), spectrum_(std::move(s)) {}

  HermitianMatrix matrix_;
  Spectrum spectrum_;
};

/// Checks hermiticity, then positivity, then trace. Each violation throws an Error with
/// its own kind and the measured defect.
inline DensityMatrix validate_density(const Matrix& m) {
  HermitianMatrix h(m);  // throws NotHermitian
  Spectrum s = hermitian_eig(h);
  const double min_eig = s.values.front();
  if (min_eig < -kPsdTolerance) {
    std::ostringstream os;
    os << "positivity violated by " << -min_eig;
    throw Error(ErrorKind::NotPositive, os.str(), -min_eig);
  }
  const double tr = h.trace();
  if (std::abs(tr - 1.0) > DensityMatrix::kTraceTolerance) {
    std::ostringstream os;
    os << "trace " << tr << " differs from 1 by " << std::abs(tr - 1.0);
    throw Error(ErrorKind::TraceMismatch, os.str(), std::abs(tr - 1.0));
  }
  for (double& v : s.values) v = std::max(v, 0.0);
  return DensityMatrix(std::move(h), std::move(s));
}

/// Matrix of independent complex standard Gaussians, filled row by row.
inline Matrix gaussian_matrix(std::size_t rows, std::size_t cols, SplitMix64& rng) {
  Matrix g(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) g(i, j) = rng.complex_gaussian();
  return g;
}

/// Ginibre-induced state G G^dagger / Tr(G G^dagger) for a dim x rank Gaussian G.
/// rank == dim samples the Hilbert-Schmidt measure.
inline DensityMatrix random_density(std::size_t dim, std::size_t rank, std::uint64_t seed) {
  if (dim == 0 || rank == 0 || rank > dim) {
    throw Error(ErrorKind::InvalidArgument, "random_density needs 1 <= rank <= dim");
  }
  SplitMix64 rng(seed);
  const Matrix g = gaussian_matrix(dim, rank, rng);
  Matrix w = g * g.adjoint();
  w *= 1.0 / w.trace().real();
  return validate_density(w);
}

/// GUE-style random Hermitian with entries of unit scale.
inline HermitianMatrix random_hermitian(std::size_t dim, std::uint64_t seed, double scale = 1.0) {
  SplitMix64 rng(seed);
  const Matrix g = gaussian_matrix(dim, dim, rng);
  return HermitianMatrix::hermitian_part((g + g.adjoint()) * (0.5 * scale));
}

/// Eigenvector basis of a random Hermitian matrix.
inline Matrix random_unitary(std::size_t dim, std::uint64_t seed) {
  return hermitian_eig(random_hermitian(dim, seed)).vectors;
}

inline DensityMatrix maximally_mixed(std::size_t dim) {
  return validate_density(Matrix::identity(dim) * (1.0 / static_cast<double>(dim)));
}

/// |psi><psi| for a normalized copy of psi.
inline DensityMatrix pure_state(const std::vector<Complex>& psi) {
  double norm2 = 0.0;
  for (const auto& z : psi) norm2 += std::norm(z);
  if (!(norm2 > 0.0)) throw Error(ErrorKind::InvalidArgument, "pure_state needs a nonzero vector");
  Matrix m(psi.size(), psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i)
    for (std::size_t j = 0; j < psi.size(); ++j) m(i, j) = psi[i] * std::conj(psi[j]) / norm2;
  return validate_density(m);
}

/// (1/sqrt d) sum_i |i>|i>.
inline DensityMatrix maximally_entangled(std::size_t d) {
  std::vector<Complex> psi(d * d);
  for (std::size_t i = 0; i < d; ++i) psi[i * d + i] = 1.0;
  return pure_state(psi);
}

/// (|0...0> + |1...1>)/sqrt 2 on n qubits.
inline DensityMatrix ghz_state(std::size_t qubits) {
  std::vector<Complex> psi(std::size_t{1} << qubits);
  psi.front() = 1.0;
  psi.back() = 1.0;
  return pure_state(psi);
}

inline DensityMatrix product_state(const std::vector<DensityMatrix>& factors) {
  if (factors.empty()) throw Error(ErrorKind::InvalidArgument, "product_state needs a factor");
  Matrix m = factors.front().matrix();
  for (std::size_t k = 1; k < factors.size(); ++k) m = kron(m, factors[k].matrix().matrix());
  return validate_density(m);
}

/// Marginal on the kept subsystems.
inline DensityMatrix marginal(const DensityMatrix& rho, const TensorShape& shape,
                              std::vector<std::size_t> keep) {
  return validate_density(partial_trace(rho.matrix().matrix(), shape, std::move(keep)));
}

/// (1 - eps) rho + eps I / dim.
inline DensityMatrix epsilon_mix(const DensityMatrix& rho, double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw Error(ErrorKind::InvalidArgument, "epsilon_mix needs eps in [0, 1]");
  if (eps == 0.0) return rho;
  const double n = static_cast<double>(rho.dim());
  return validate_density(rho.matrix().matrix() * (1.0 - eps) + Matrix::identity(rho.dim()) * (eps / n));
}

// ---------------------------------------------------------------------------
// Slater example

struct SlaterPair {
  DensityMatrix rho;
  DensityMatrix sigma;
  TensorShape shape;
};

/// Largest ambient dimension accepted by the Slater constructors (N^2 <= 128).
inline constexpr std::size_t kMaxAmbientDim = 128;

/// Two-particle reduction of the N-particle Slater determinant on C^N: the normalized
/// projector (I - SWAP)/2 / (N(N-1)/2) onto the antisymmetric subspace, paired with
/// the product of its one-particle marginals, I/N^2.
inline SlaterPair slater_pair(std::size_t n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "slater_pair needs N >= 2");
  if (n * n > kMaxAmbientDim) {
    std::ostringstream os;
    os << "slater_pair: N = " << n << " gives dimension " << n * n << " > " << kMaxAmbientDim;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  const std::size_t dim = n * n;
  const double norm = 1.0 / (static_cast<double>(n * (n - 1)) / 2.0);
  Matrix p(dim, dim);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      p(i * n + j, i * n + j) += 0.5 * norm;
      p(i * n + j, j * n + i) -= 0.5 * norm;
    }
  return {validate_density(p), maximally_mixed(dim), TensorShape({n, n})};
}

// ---------------------------------------------------------------------------
// Equality family

/// One block j of the equality family: weights q_j, r_j, a left factor of dimension
/// left_dim and a right factor of dimension right_dim. Block operators that are not
/// attached are drawn at random.
struct EqualityBlock {
  double q = 1.0;
  double r = 1.0;
  std::size_t left_dim = 1;
  std::size_t right_dim = 1;
  std::optional<DensityMatrix> rho1;
  std::optional<DensityMatrix> sigma1;
  std::optional<DensityMatrix> tau2;
};

struct BlockSpec {
  std::vector<EqualityBlock> blocks;

  static constexpr double kWeightTolerance = 1e-12;

  void validate() const {
    if (blocks.empty()) throw Error(ErrorKind::InvalidArgument, "block spec is empty");
    double sq = 0.0, sr = 0.0;
    for (const auto& b : blocks) {
      if (!(b.q > 0.0) || !(b.r > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "block weights must be strictly positive");
      }
      if (b.left_dim == 0 || b.right_dim == 0) throw Error(ErrorKind::InvalidArgument, "block dims must be positive");
      if (b.right_dim != blocks.front().right_dim) {
        throw Error(ErrorKind::ShapeMismatch, "all blocks must share the system-2 dimension");
      }
      auto check = [](const std::optional<DensityMatrix>& op, std::size_t d, const char* name) {
        if (op && op->dim() != d) {
          throw Error(ErrorKind::ShapeMismatch, std::string("attached ") + name + " has wrong dimension");
        }
      };
      check(b.rho1, b.left_dim, "rho1");
      check(b.sigma1, b.left_dim, "sigma1");
      check(b.tau2, b.right_dim, "tau2");
      sq += b.q;
      sr += b.r;
    }
    if (std::abs(sq - 1.0) > kWeightTolerance || std::abs(sr - 1.0) > kWeightTolerance) {
      std::ostringstream os;
      os << "block weights must sum to one (q sums to " << sq << ", r sums to " << sr << ")";
      throw Error(ErrorKind::InvalidArgument, os.str(), std::max(std::abs(sq - 1.0), std::abs(sr - 1.0)));
    }
  }
};

/// Frobenius norm of (ln rho12 - ln sigma12) - (ln rho1 - ln sigma1) (x) I_2, logs on
/// the support. Zero exactly when monotonicity of relative entropy under Tr_2 is
/// saturated (for full-rank arguments).
inline double log_difference_residual(const DensityMatrix& rho12, const DensityMatrix& sigma12,
                                      const TensorShape& shape) {
  shape.require_matches(rho12.dim());
  shape.require_matches(sigma12.dim());
  const auto rho1 = marginal(rho12, shape, {0});
  const auto sigma1 = marginal(sigma12, shape, {0});
  const auto log = MatrixFunction::log_on_support();
  const HermitianMatrix joint = matrix_fn(rho12.spectrum(), log) - matrix_fn(sigma12.spectrum(), log);
  const HermitianMatrix local = matrix_fn(rho1.spectrum(), log) - matrix_fn(sigma1.spectrum(), log);
  return (joint - lift(local, shape, 0)).matrix().frobenius_norm();
}

struct EqualityInstance {
  DensityMatrix rho12;
  DensityMatrix sigma12;
  TensorShape shape;
  double residual;
};

inline constexpr double kEqualityResidualLimit = 1e-8;

/// rho12 = (+)_j q_j rho1_j (x) tau2_j and sigma12 = (+)_j r_j sigma1_j (x) tau2_j, with
/// the direct sum running over blocks of system 1. Shape is (sum_j left_dim_j, right_dim).
/// Throws if the log-difference residual of the result exceeds 1e-8.
inline EqualityInstance equality_family(const BlockSpec& spec, std::uint64_t seed) {
  spec.validate();
  SplitMix64 rng(seed);
  std::vector<Matrix> rho_blocks, sigma_blocks;
  std::size_t left_total = 0;
  for (const auto& b : spec.blocks) {
    const auto rho1 = b.rho1 ? *b.rho1 : random_density(b.left_dim, b.left_dim, rng.next());
    const auto sigma1 = b.sigma1 ? *b.sigma1 : random_density(b.left_dim, b.left_dim, rng.next());
    const auto tau2 = b.tau2 ? *b.tau2 : random_density(b.right_dim, b.right_dim, rng.next());
    rho_blocks.push_back(kron(rho1.matrix().matrix() * b.q, tau2.matrix().matrix()));
    sigma_blocks.push_back(kron(sigma1.matrix().matrix() * b.r, tau2.matrix().matrix()));
    left_total += b.left_dim;
  }
  TensorShape shape({left_total, spec.blocks.front().right_dim});
  auto rho12 = validate_density(direct_sum(rho_blocks));
  auto sigma12 = validate_density(direct_sum(sigma_blocks));
  const double residual = log_difference_residual(rho12, sigma12, shape);
  if (!(residual <= kEqualityResidualLimit)) {
    std::ostringstream os;
    os << "equality family residual " << residual << " exceeds " << kEqualityResidualLimit;
    throw Error(ErrorKind::NotConverged, os.str(), residual);
  }
  return {std::move(rho12), std::move(sigma12), std::move(shape), residual};
}

// ---------------------------------------------------------------------------
// Channels

/// Completely positive map rho -> sum_k K_k rho K_k^dagger, trace preserving:
/// sum_k K_k^dagger K_k = I within 1e-10.
class KrausChannel {
 public:
  static constexpr double kTraceTolerance = 1e-10;

  KrausChannel(std::size_t in_dim, std::size_t out_dim, std::vector<Matrix> kraus)
      : in_dim_(in_dim), out_dim_(out_dim), kraus_(std::move(kraus)) {
    if (kraus_.empty()) throw Error(ErrorKind::InvalidArgument, "channel needs at least one Kraus operator");
    Matrix sum(in_dim_, in_dim_);
    for (const auto& k : kraus_) {
      if (k.rows() != out_dim_ || k.cols() != in_dim_) {
        throw Error(ErrorKind::ShapeMismatch, "Kraus operator must be out_dim x in_dim");
      }
      sum += k.adjoint() * k;
    }
    const double defect = (sum - Matrix::identity(in_dim_)).max_abs();
    if (defect > kTraceTolerance) {
      std::ostringstream os;
      os << "Kraus operators are not trace preserving (defect " << defect << ")";
      throw Error(ErrorKind::TraceMismatch, os.str(), defect);
    }
  }

  std::size_t in_dim() const noexcept { return in_dim_; }
  std::size_t out_dim() const noexcept { return out_dim_; }
  const std::vector<Matrix>& kraus_ops() const noexcept { return kraus_; }

  static KrausChannel identity(std::size_t d) { return {d, d, {Matrix::identity(d)}}; }

  /// Kraus form of the partial trace onto `keep`: one operator per traced basis vector.
  static KrausChannel partial_trace(const TensorShape& shape, std::vector<std::size_t> keep) {
    keep = detail::normalize_keep(shape, std::move(keep));
    const auto kept = detail::offsets_over(shape, keep);
    const auto traced = detail::offsets_over(shape, detail::complement(shape, keep));
    std::vector<Matrix> ops;
    for (auto t : traced) {
      Matrix k(kept.size(), shape.total());
      for (std::size_t a = 0; a < kept.size(); ++a) k(a, kept[a] + t) = 1.0;
      ops.push_back(std::move(k));
    }
    return {shape.total(), kept.size(), std::move(ops)};
  }

  /// rho -> Tr(rho) I / out_dim, via K_ij = |i><j| / sqrt(out_dim).
  static KrausChannel completely_depolarizing(std::size_t in_dim, std::size_t out_dim) {
    std::vector<Matrix> ops;
    const double scale = 1.0 / std::sqrt(static_cast<double>(out_dim));
    for (std::size_t i = 0; i < out_dim; ++i)
      for (std::size_t j = 0; j < in_dim; ++j) {
        Matrix k(out_dim, in_dim);
        k(i, j) = scale;
        ops.push_back(std::move(k));
      }
    return {in_dim, out_dim, std::move(ops)};
  }

 private:
  std::size_t in_dim_;
  std::size_t out_dim_;
  std::vector<Matrix> kraus_;
};

inline Matrix apply_channel(const KrausChannel& channel, const Matrix& rho) {
  if (rho.rows() != channel.in_dim() || rho.cols() != channel.in_dim()) {
    throw Error(ErrorKind::ShapeMismatch, "channel input dimension mismatch");
  }
  Matrix out(channel.out_dim(), channel.out_dim());
  for (const auto& k : channel.kraus_ops()) out += k * rho * k.adjoint();
  return out;
}

inline DensityMatrix apply_channel(const KrausChannel& channel, const DensityMatrix& rho) {
  return validate_density(apply_channel(channel, rho.matrix().matrix()));
}

/// Random channel from the isometry V = [K_0; K_1; ...] obtained by orthonormalizing
/// the columns of an (n_kraus * out_dim) x in_dim Gaussian matrix.
inline KrausChannel random_channel(std::size_t in_dim, std::size_t out_dim, std::size_t n_kraus,
                                   std::uint64_t seed) {
  if (in_dim == 0 || out_dim == 0 || n_kraus == 0) {
    throw Error(ErrorKind::InvalidArgument, "random_channel dimensions must be positive");
  }
  const std::size_t rows = n_kraus * out_dim;
  if (rows < in_dim) {
    std::ostringstream os;
    os << "random_channel: n_kraus * out_dim = " << rows << " < in_dim = " << in_dim;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  SplitMix64 rng(seed);
  Matrix v = gaussian_matrix(rows, in_dim, rng);
  // Modified Gram-Schmidt, two passes.
  for (std::size_t j = 0; j < in_dim; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < j; ++k) {
        Complex dot = 0.0;
        for (std::size_t i = 0; i < rows; ++i) dot += std::conj(v(i, k)) * v(i, j);
        for (std::size_t i = 0; i < rows; ++i) v(i, j) -= dot * v(i, k);
      }
    double norm = 0.0;
    for (std::size_t i = 0; i < rows; ++i) norm += std::norm(v(i, j));
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < rows; ++i) v(i, j) /= norm;
  }
  std::vector<Matrix> ops;
  for (std::size_t k = 0; k < n_kraus; ++k) {
    Matrix block(out_dim, in_dim);
    for (std::size_t i = 0; i < out_dim; ++i)
      for (std::size_t j = 0; j < in_dim; ++j) block(i, j) = v(k * out_dim + i, j);
    ops.push_back(std::move(block));
  }
  return {in_dim, out_dim, std::move(ops)};
}

}  // namespace qentropy
