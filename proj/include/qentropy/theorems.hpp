#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qentropy/error.hpp"
#include "qentropy/functionals.hpp"
#include "qentropy/spectral.hpp"
#include "qentropy/states.hpp"
#include "qentropy/tensor.hpp"

namespace qentropy {

inline constexpr double kDefaultTolerance = 1e-8;
/// Limit for quantities that are exact identities (overlap identity, resolvent trace).
inline constexpr double kIdentityTolerance = 1e-8;

struct NamedValue {
  std::string label;
  double value;
};

/// An equality-condition defect. Residuals with a limit take part in the verdict;
/// residuals without one are informational.
struct Residual {
  std::string label;
  double value;
  std::optional<double> limit;

  bool within_limit() const { return !limit || value <= *limit; }
};

/// Both sides of one inequality instance. Every slack is oriented so that the
/// inequality holds iff slack >= 0.
struct Certificate {
  std::string name;
  double lhs = 0.0;
  std::vector<NamedValue> bounds;
  std::vector<NamedValue> slacks;
  std::vector<Residual> residuals;
  double tolerance = kDefaultTolerance;
  bool infinite_lhs = false;
  std::vector<std::string> notes;

  bool pass() const {
    for (const auto& s : slacks)
      if (!(s.value >= -tolerance)) return false;
    for (const auto& r : residuals)
      if (!r.within_limit()) return false;
    return true;
  }

  double min_slack() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : slacks) m = std::min(m, s.value);
    return m;
  }

  std::optional<double> bound(std::string_view label) const { return find(bounds, label); }
  std::optional<double> slack(std::string_view label) const { return find(slacks, label); }
  std::optional<double> residual(std::string_view label) const {
    for (const auto& r : residuals)
      if (r.label == label) return r.value;
    return std::nullopt;
  }

  /// Records a lower bound on lhs together with its slack lhs - value.
  void add_lower_bound(std::string label, double value) {
    slacks.push_back({label, infinite_lhs ? std::numeric_limits<double>::infinity() : lhs - value});
    bounds.push_back({std::move(label), value});
  }

 private:
  static std::optional<double> find(const std::vector<NamedValue>& v, std::string_view label) {
    for (const auto& x : v)
      if (x.label == label) return x.value;
    return std::nullopt;
  }
};

namespace detail {

inline void require_bipartite(const TensorShape& shape, std::size_t dim) {
  if (shape.size() != 2) throw Error(ErrorKind::ShapeMismatch, "this certificate needs a bipartite shape");
  shape.require_matches(dim);
}

inline void require_full_rank(const DensityMatrix& m, const char* name) {
  if (!(m.min_eigenvalue() > kSupportFloor)) {
    std::ostringstream os;
    os << name << " is rank deficient (min eigenvalue " << m.min_eigenvalue()
       << "); regularize with epsilon_mix first";
    throw Error(ErrorKind::RankDeficient, os.str(), m.min_eigenvalue());
  }
}

// -2 ln(1 - y/2) for y = Tr[(sqrt a - sqrt b)^2].
inline double renyi_half_from_root_distance(double root_distance_sq) {
  const double arg = 1.0 - 0.5 * root_distance_sq;
  if (!(arg > 0.0)) {
    std::ostringstream os;
    os << "degenerate overlap: 1 - Tr[(sqrt a - sqrt b)^2]/2 = " << arg;
    throw Error(ErrorKind::DegenerateOverlap, os.str(), arg);
  }
  return -2.0 * std::log(arg);
}

inline Residual overlap_identity_residual(const DensityMatrix& a, const DensityMatrix& b, double root_distance_sq) {
  return {"overlap_identity", std::abs(root_overlap(a, b) - (1.0 - 0.5 * root_distance_sq)), kIdentityTolerance};
}

}  // namespace detail

/// Quantitative subadditivity on a bipartite state. lhs is the mutual information;
/// bounds are the root-overlap bound -2 ln(1 - ½ Tr[(√ρ12 - √(ρ1⊗ρ2))²]), the Pinsker
/// bound ½ (Tr|ρ12 - ρ1⊗ρ2|)² and the Hilbert-Schmidt term Tr[(√ρ12 - √(ρ1⊗ρ2))²].
inline Certificate subadditivity_certificate(const DensityMatrix& rho12, const TensorShape& shape,
                                             double tolerance = kDefaultTolerance) {
  detail::require_bipartite(shape, rho12.dim());
  const auto product = product_of_marginals(rho12, shape);

  Certificate c;
  c.name = "subadditivity";
  c.tolerance = tolerance;
  c.lhs = mutual_information(rho12, shape);

  const double hs = root_distance_squared(rho12, product);
  const double renyi = detail::renyi_half_from_root_distance(hs);
  const double tn = trace_norm(rho12.matrix() - product.matrix());
  c.add_lower_bound("renyi", renyi);
  c.add_lower_bound("pinsker", 0.5 * tn * tn);
  c.add_lower_bound("hs", hs);
  c.slacks.push_back({"renyi_vs_hs", renyi - hs});
  c.slacks.push_back({"hs_nonnegative", hs});

  c.residuals.push_back(detail::overlap_identity_residual(rho12, product, hs));
  const double d = relative_entropy(rho12, product).value();
  c.residuals.push_back({"mutual_information_vs_divergence", std::abs(c.lhs - d), kIdentityTolerance});
  return c;
}

/// Multipartite version: lhs = Σ S_j - S, bound -2 ln(1 - ½ Tr[(√ρ - √(ρ1⊗…⊗ρN))²]).
inline Certificate multipartite_certificate(const DensityMatrix& rho, const TensorShape& shape,
                                            double tolerance = kDefaultTolerance) {
  if (shape.size() < 2) throw Error(ErrorKind::ShapeMismatch, "multipartite certificate needs >= 2 subsystems");
  shape.require_matches(rho.dim());
  const auto product = product_of_marginals(rho, shape);

  Certificate c;
  c.name = "multipartite";
  c.tolerance = tolerance;
  c.lhs = total_correlation(rho, shape);
  const double hs = root_distance_squared(rho, product);
  c.add_lower_bound("renyi", detail::renyi_half_from_root_distance(hs));
  c.residuals.push_back(detail::overlap_identity_residual(rho, product, hs));
  return c;
}

/// Pinsker and the α = ½ Rényi lower bound on D(ρ||σ). An infinite D passes with
/// `infinite_lhs` set.
inline Certificate divergence_bounds_certificate(const DensityMatrix& rho, const DensityMatrix& sigma,
                                                 double tolerance = kDefaultTolerance) {
  Certificate c;
  c.name = "divergence_bounds";
  c.tolerance = tolerance;
  const auto d = relative_entropy(rho, sigma);
  c.infinite_lhs = d.is_infinite();
  c.lhs = d.value();
  if (c.infinite_lhs) c.notes.push_back("infinite relative entropy (support violation)");

  const double tn = trace_norm(rho.matrix() - sigma.matrix());
  c.add_lower_bound("pinsker", 0.5 * tn * tn);
  const double overlap = root_overlap(rho, sigma);
  if (overlap > 0.0) {
    c.add_lower_bound("renyi_half", -2.0 * std::log(overlap));
  } else if (!c.infinite_lhs) {
    throw Error(ErrorKind::DegenerateOverlap, "zero root overlap with finite relative entropy", overlap);
  }
  c.residuals.push_back(detail::overlap_identity_residual(rho, sigma, root_distance_squared(rho, sigma)));
  return c;
}

/// exp{½ ln σ12 - ½ ln σ1 ⊗ I + ½ ln ρ1 ⊗ I}, assembled in the ambient space.
inline HermitianMatrix monotonicity_exponential(const DensityMatrix& rho1, const DensityMatrix& sigma1,
                                                const DensityMatrix& sigma12, const TensorShape& shape) {
  const auto log = MatrixFunction::log_on_support();
  const HermitianMatrix exponent = 0.5 * matrix_fn(sigma12.spectrum(), log) -
                                   0.5 * lift(matrix_fn(sigma1.spectrum(), log), shape, 0) +
                                   0.5 * lift(matrix_fn(rho1.spectrum(), log), shape, 0);
  return expm(exponent);
}

/// Remainder for monotonicity of relative entropy under Tr_2:
/// D(ρ12||σ12) - D(ρ1||σ1) >= Tr[(√ρ12 - exp{½ ln σ12 - ½ ln σ1 + ½ ln ρ1})²].
///
/// Requires σ12, σ1 and ρ1 to be full rank (RankDeficient otherwise). The
/// `log_difference` residual measures the equality condition
/// ln ρ12 - ln σ12 = (ln ρ1 - ln σ1) ⊗ I.
inline Certificate monotonicity_certificate(const DensityMatrix& rho12, const DensityMatrix& sigma12,
                                            const TensorShape& shape, double tolerance = kDefaultTolerance) {
  detail::require_bipartite(shape, rho12.dim());
  shape.require_matches(sigma12.dim());
  const auto rho1 = marginal(rho12, shape, {0});
  const auto sigma1 = marginal(sigma12, shape, {0});
  detail::require_full_rank(sigma12, "sigma12");
  detail::require_full_rank(sigma1, "sigma1");
  detail::require_full_rank(rho1, "rho1");

  Certificate c;
  c.name = "monotonicity";
  c.tolerance = tolerance;
  const double d12 = relative_entropy(rho12, sigma12).finite_value();
  const double d1 = relative_entropy(rho1, sigma1).finite_value();
  c.lhs = d12 - d1;

  const auto e = monotonicity_exponential(rho1, sigma1, sigma12, shape);
  const HermitianMatrix diff = matrix_fn(rho12.spectrum(), MatrixFunction::sqrt()) - e;
  const double remainder = trace_of_product(diff, diff).real();
  c.add_lower_bound("remainder", remainder);
  c.add_lower_bound("zero", 0.0);
  c.slacks.push_back({"remainder_nonnegative", remainder});
  c.residuals.push_back({"log_difference", log_difference_residual(rho12, sigma12, shape), std::nullopt});
  return c;
}

/// T_ρ(τ1) = ρ12^{1/2} (ρ1^{-1/2} τ1 ρ1^{-1/2} ⊗ I) ρ12^{1/2}, inverse root on supp ρ1.
/// Throws SupportViolation when τ1 puts weight above 1e-8 outside supp ρ1.
inline DensityMatrix petz_recovery(const DensityMatrix& rho12, const TensorShape& shape, const DensityMatrix& tau1) {
  detail::require_bipartite(shape, rho12.dim());
  const auto rho1 = marginal(rho12, shape, {0});
  if (tau1.dim() != rho1.dim()) throw Error(ErrorKind::ShapeMismatch, "tau1 must live on system 1");

  const auto& lr = rho1.spectrum().values;
  const auto& lt = tau1.spectrum().values;
  const Matrix w = detail::eigenbasis_overlaps(tau1.spectrum(), rho1.spectrum());
  for (std::size_t i = 0; i < lt.size(); ++i) {
    if (lt[i] <= kSupportFloor) continue;
    double outside = 0.0;
    for (std::size_t k = 0; k < lr.size(); ++k)
      if (lr[k] <= kSupportFloor) outside += w(i, k).real();
    if (outside > kSupportWeightThreshold) {
      std::ostringstream os;
      os << "tau1 is not supported in supp rho1 (outside weight " << outside << ")";
      throw Error(ErrorKind::SupportViolation, os.str(), outside);
    }
  }

  const auto inv_root = matrix_fn(rho1.spectrum(), MatrixFunction::power_on_support(-0.5));
  const auto root12 = matrix_fn(rho12.spectrum(), MatrixFunction::sqrt());
  const Matrix inner = inv_root.matrix() * tau1.matrix().matrix() * inv_root.matrix();
  const Matrix out = root12.matrix() * lift(inner, shape, 0) * root12.matrix();
  return validate_density(HermitianMatrix::hermitian_part(out));
}

/// Tr[(T_ρ(σ1) - σ12)²].
inline double petz_residual(const DensityMatrix& rho12, const DensityMatrix& sigma12, const TensorShape& shape) {
  const auto recovered = petz_recovery(rho12, shape, marginal(sigma12, shape, {0}));
  const HermitianMatrix diff = recovered.matrix() - sigma12.matrix();
  return trace_of_product(diff, diff).real();
}

inline constexpr double kEqualityGapLimit = 1e-7;
inline constexpr double kPetzResidualLimit = 1e-7;

/// Consistency of the two equality conditions on a pair that should saturate
/// monotonicity: log-difference residual <= 1e-8, gap, remainder and Petz residual
/// each <= 1e-7, plus the usual monotonicity slacks.
inline Certificate equality_certificate(const DensityMatrix& rho12, const DensityMatrix& sigma12,
                                        const TensorShape& shape, double tolerance = kDefaultTolerance) {
  Certificate c = monotonicity_certificate(rho12, sigma12, shape, tolerance);
  c.name = "equality";
  c.residuals.front().limit = kEqualityResidualLimit;
  c.residuals.push_back({"gap", std::abs(c.lhs), kEqualityGapLimit});
  c.residuals.push_back({"remainder", std::abs(*c.bound("remainder")), kEqualityGapLimit});
  c.residuals.push_back({"petz", petz_residual(rho12, sigma12, shape), kPetzResidualLimit});
  return c;
}

/// ∫₀^∞ (t + σ1)^{-1} ρ1 (t + σ1)^{-1} dt, evaluated entrywise in the σ1 eigenbasis
/// with resolvent_integral_kernel.
inline Matrix resolvent_integral(const DensityMatrix& rho1, const DensityMatrix& sigma1) {
  const auto& w = sigma1.spectrum().vectors;
  const auto& mu = sigma1.spectrum().values;
  Matrix m = w.adjoint() * rho1.matrix().matrix() * w;
  for (std::size_t k = 0; k < mu.size(); ++k)
    for (std::size_t l = 0; l < mu.size(); ++l) m(k, l) *= resolvent_integral_kernel(mu[k], mu[l]);
  return w * m * w.adjoint();
}

/// Triple-matrix Golden-Thompson: Tr exp{ln σ12 - ln σ1 + ln ρ1} <= Tr σ12 ∫ (t+σ1)^{-1} ρ1 (t+σ1)^{-1} dt.
/// With σ1 the marginal of σ12 the right side equals Tr ρ1 = 1; the
/// `integral_identity` residual checks this.
inline Certificate gt3_certificate(const DensityMatrix& rho1, const DensityMatrix& sigma1,
                                   const DensityMatrix& sigma12, const TensorShape& shape,
                                   double tolerance = kDefaultTolerance) {
  detail::require_bipartite(shape, sigma12.dim());
  if (rho1.dim() != shape[0] || sigma1.dim() != shape[0]) {
    throw Error(ErrorKind::ShapeMismatch, "rho1 and sigma1 must live on system 1");
  }
  detail::require_full_rank(sigma12, "sigma12");
  detail::require_full_rank(sigma1, "sigma1");
  detail::require_full_rank(rho1, "rho1");

  const auto log = MatrixFunction::log_on_support();
  const HermitianMatrix exponent = matrix_fn(sigma12.spectrum(), log) -
                                   lift(matrix_fn(sigma1.spectrum(), log), shape, 0) +
                                   lift(matrix_fn(rho1.spectrum(), log), shape, 0);
  Certificate c;
  c.name = "gt3";
  c.tolerance = tolerance;
  c.lhs = expm(exponent).trace();

  const double integral =
      trace_of_product(sigma12.matrix().matrix(), lift(resolvent_integral(rho1, sigma1), shape, 0)).real();
  c.bounds.push_back({"integral", integral});
  c.slacks.push_back({"integral", integral - c.lhs});
  c.slacks.push_back({"unit", 1.0 - c.lhs});
  c.residuals.push_back({"integral_identity", std::abs(integral - 1.0), kIdentityTolerance});
  return c;
}

/// Peierls-Bogoliubov Tr e^{-H+A} >= exp(Tr A e^{-H}) (with Tr e^{-H} = 1) and
/// two-matrix Golden-Thompson Tr e^{X+Y} <= Tr e^X e^Y for X = -H, Y = A. If
/// Tr e^{-H} is off by more than 1e-9, H is shifted by ln Tr e^{-H} first and a note
/// is recorded.
inline Certificate proofstep_certificate(HermitianMatrix h, const HermitianMatrix& a,
                                         double tolerance = kDefaultTolerance) {
  if (h.dim() != a.dim()) throw Error(ErrorKind::ShapeMismatch, "H and A must have the same dimension");
  Certificate c;
  c.name = "proofstep";
  c.tolerance = tolerance;

  const double z = expm(-1.0 * h).trace();
  if (std::abs(z - 1.0) > 1e-9) {
    h += HermitianMatrix::identity(h.dim()) * std::log(z);
    std::ostringstream os;
    os << "normalized H by ln Tr e^{-H} = " << std::log(z);
    c.notes.push_back(os.str());
  }
  const HermitianMatrix gibbs = expm(-1.0 * h);
  c.lhs = expm(a - h).trace();

  const double pb = std::exp(trace_of_product(a, gibbs).real());
  c.add_lower_bound("peierls_bogoliubov", pb);

  const double gt = trace_of_product(gibbs, expm(a)).real();
  c.bounds.push_back({"golden_thompson", gt});
  c.slacks.push_back({"golden_thompson", gt - c.lhs});
  return c;
}

/// D(ρ||σ) >= D(T(ρ)||T(σ)) for a Kraus channel T. Infinite D(ρ||σ) passes flagged.
inline Certificate data_processing_certificate(const DensityMatrix& rho, const DensityMatrix& sigma,
                                               const KrausChannel& channel, double tolerance = kDefaultTolerance) {
  if (rho.dim() != channel.in_dim() || sigma.dim() != channel.in_dim()) {
    throw Error(ErrorKind::ShapeMismatch, "channel input dimension does not match the states");
  }
  Certificate c;
  c.name = "data_processing";
  c.tolerance = tolerance;
  const auto d = relative_entropy(rho, sigma);
  c.infinite_lhs = d.is_infinite();
  c.lhs = d.value();
  if (c.infinite_lhs) c.notes.push_back("infinite relative entropy (support violation)");
  const auto out = relative_entropy(apply_channel(channel, rho), apply_channel(channel, sigma));
  c.add_lower_bound("processed", out.value());
  return c;
}

}  // namespace qentropy
