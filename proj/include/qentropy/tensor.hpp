#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "qentropy/error.hpp"
#include "qentropy/matrix.hpp"

namespace qentropy {

/// Factorization d_0 x d_1 x ... of the ambient space. Subsystem 0 is the leftmost
/// Kronecker factor, i.e. the slowest-varying index. Subsystems are numbered from 0.
class TensorShape {
 public:
  TensorShape() = default;
  TensorShape(std::initializer_list<std::size_t> dims) : TensorShape(std::vector<std::size_t>(dims)) {}
  explicit TensorShape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw Error(ErrorKind::ShapeMismatch, "tensor shape needs at least one subsystem");
    for (auto d : dims_)
      if (d == 0) throw Error(ErrorKind::ShapeMismatch, "subsystem dimensions must be positive");
  }

  std::size_t size() const noexcept { return dims_.size(); }
  std::size_t operator[](std::size_t k) const { return dims_.at(k); }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }

  std::size_t total() const {
    return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
  }

  /// Row-major stride of subsystem k in the ambient index.
  std::size_t stride(std::size_t k) const {
    std::size_t s = 1;
    for (std::size_t j = k + 1; j < dims_.size(); ++j) s *= dims_[j];
    return s;
  }

  /// Two-party view (d_0, d_1 * ... * d_{N-1}).
  TensorShape first_vs_rest() const {
    if (dims_.size() < 2) throw Error(ErrorKind::ShapeMismatch, "need at least two subsystems");
    return TensorShape({dims_[0], total() / dims_[0]});
  }

  std::string to_string() const {
    std::ostringstream os;
    for (std::size_t k = 0; k < dims_.size(); ++k) os << (k ? "x" : "") << dims_[k];
    return os.str();
  }

  void require_matches(std::size_t ambient_dim) const {
    if (total() != ambient_dim) {
      std::ostringstream os;
      os << "shape " << to_string() << " (total " << total() << ") does not match dimension "
         << ambient_dim;
      throw Error(ErrorKind::ShapeMismatch, os.str());
    }
  }

  friend bool operator==(const TensorShape&, const TensorShape&) = default;

 private:
  std::vector<std::size_t> dims_;
};

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex(0.0)) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

inline HermitianMatrix kron(const HermitianMatrix& a, const HermitianMatrix& b) {
  return HermitianMatrix::hermitian_part(kron(a.matrix(), b.matrix()));
}

namespace detail {

// Ambient offsets of every multi-index over `subsystems` (others held at 0), enumerated
// with the first listed subsystem slowest.
inline std::vector<std::size_t> offsets_over(const TensorShape& shape,
                                             const std::vector<std::size_t>& subsystems) {
  std::vector<std::size_t> offsets{0};
  for (auto k : subsystems) {
    const std::size_t stride = shape.stride(k);
    std::vector<std::size_t> next;
    next.reserve(offsets.size() * shape[k]);
    for (auto base : offsets)
      for (std::size_t digit = 0; digit < shape[k]; ++digit) next.push_back(base + digit * stride);
    offsets = std::move(next);
  }
  return offsets;
}

inline std::vector<std::size_t> normalize_keep(const TensorShape& shape, std::vector<std::size_t> keep) {
  if (keep.empty()) throw Error(ErrorKind::InvalidArgument, "partial trace must keep at least one subsystem");
  std::sort(keep.begin(), keep.end());
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) {
    throw Error(ErrorKind::InvalidArgument, "duplicate subsystem index in keep set");
  }
  if (keep.back() >= shape.size()) {
    std::ostringstream os;
    os << "subsystem index " << keep.back() << " out of range for shape " << shape.to_string();
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  return keep;
}

inline std::vector<std::size_t> complement(const TensorShape& shape, const std::vector<std::size_t>& keep) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < shape.size(); ++k)
    if (!std::binary_search(keep.begin(), keep.end(), k)) out.push_back(k);
  return out;
}

}  // namespace detail

/// Traces out every subsystem not listed in `keep`. Kept subsystems stay in their
/// original relative order. Implemented by direct summation over traced multi-indices.
inline Matrix partial_trace(const Matrix& m, const TensorShape& shape, std::vector<std::size_t> keep) {
  if (!m.is_square()) throw Error(ErrorKind::ShapeMismatch, "partial trace needs a square matrix");
  shape.require_matches(m.rows());
  keep = detail::normalize_keep(shape, std::move(keep));
  const auto kept = detail::offsets_over(shape, keep);
  const auto traced = detail::offsets_over(shape, detail::complement(shape, keep));

  Matrix out(kept.size(), kept.size());
  for (std::size_t a = 0; a < kept.size(); ++a)
    for (std::size_t b = 0; b < kept.size(); ++b) {
      Complex s = 0.0;
      for (auto t : traced) s += m(kept[a] + t, kept[b] + t);
      out(a, b) = s;
    }
  return out;
}

inline HermitianMatrix partial_trace(const HermitianMatrix& m, const TensorShape& shape,
                                     std::vector<std::size_t> keep) {
  return HermitianMatrix::hermitian_part(partial_trace(m.matrix(), shape, std::move(keep)));
}

/// I (x) ... (x) A (x) ... (x) I with A in slot `at`.
inline Matrix lift(const Matrix& a, const TensorShape& shape, std::size_t at) {
  if (at >= shape.size()) throw Error(ErrorKind::InvalidArgument, "lift slot out of range");
  if (!a.is_square() || a.rows() != shape[at]) {
    std::ostringstream os;
    os << "lift: operator of dimension " << a.rows() << " does not fit slot " << at << " of shape "
       << shape.to_string();
    throw Error(ErrorKind::ShapeMismatch, os.str());
  }
  std::size_t before = 1, after = 1;
  for (std::size_t k = 0; k < at; ++k) before *= shape[k];
  for (std::size_t k = at + 1; k < shape.size(); ++k) after *= shape[k];
  return kron(kron(Matrix::identity(before), a), Matrix::identity(after));
}

inline HermitianMatrix lift(const HermitianMatrix& a, const TensorShape& shape, std::size_t at) {
  return HermitianMatrix::hermitian_part(lift(a.matrix(), shape, at));
}

/// Block-diagonal embedding, blocks in the given order.
inline Matrix direct_sum(const std::vector<Matrix>& blocks) {
  std::size_t n = 0;
  for (const auto& b : blocks) {
    if (!b.is_square()) throw Error(ErrorKind::ShapeMismatch, "direct_sum blocks must be square");
    n += b.rows();
  }
  Matrix out(n, n);
  std::size_t offset = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) out(offset + i, offset + j) = b(i, j);
    offset += b.rows();
  }
  return out;
}

inline HermitianMatrix direct_sum(const std::vector<HermitianMatrix>& blocks) {
  std::vector<Matrix> raw;
  raw.reserve(blocks.size());
  for (const auto& b : blocks) raw.push_back(b.matrix());
  return HermitianMatrix::hermitian_part(direct_sum(raw));
}

}  // namespace qentropy
