#include <catch2/catch_amalgamated.hpp>

#include "qentropy/qentropy.hpp"
#include "test_support.hpp"

using namespace qentropy;
using Catch::Approx;
using testing::max_abs_diff;

namespace {

ErrorKind rejection_kind(const Matrix& m) {
  try {
    (void)validate_density(m);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected rejection");
  return ErrorKind::Parse;
}

}  // namespace

TEST_CASE("splitmix64 reference stream") {
  // Reference outputs of the published splitmix64 (Vigna) for seed 1234567.
  SplitMix64 rng(1234567);
  CHECK(rng.next() == 6457827717110365317ULL);
  CHECK(rng.next() == 3203168211198807973ULL);
  CHECK(rng.next() == 9817491932198370423ULL);
  CHECK(rng.next() == 4593380528125082431ULL);
  CHECK(rng.next() == 16408922859458223821ULL);
  CHECK(trial_seed(7, 0) == 7);
  CHECK(trial_seed(7, 1) == (7ULL ^ 0x9E3779B97F4A7C15ULL));
}

TEST_CASE("Box-Muller draws look standard normal") {
  SplitMix64 rng(99);
  double sum = 0.0, sum2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sum2 += g * g;
  }
  CHECK(std::abs(sum / n) < 0.05);
  CHECK(std::abs(sum2 / n - 1.0) < 0.05);
}

TEST_CASE("validate_density") {
  CHECK_NOTHROW(validate_density(Matrix::identity(2) * 0.5));

  try {
    (void)validate_density(Matrix::diagonal({1.2, -0.2}));
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotPositive);
    CHECK(e.defect() == Approx(0.2));
    CHECK(std::string(e.what()).find("positivity violated by 0.2") != std::string::npos);
  }
  try {
    (void)validate_density(Matrix::diagonal({0.6, 0.6}));
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TraceMismatch);
    CHECK(e.defect() == Approx(0.2));
  }
  CHECK(rejection_kind(Matrix{{0.5, 0.3}, {0.1, 0.5}}) == ErrorKind::NotHermitian);

  SECTION("drift below zero is clamped in the cached spectrum") {
    const auto rho = validate_density(Matrix::diagonal({1.0 + 1e-11, -1e-11}));
    CHECK(rho.min_eigenvalue() == 0.0);
  }
}

TEST_CASE("random_density") {
  CHECK(random_density(1, 1, 5).matrix() == HermitianMatrix(Matrix{{1.0}}));
  CHECK(random_density(5, 3, 42).matrix() == random_density(5, 3, 42).matrix());
  CHECK(random_density(5, 3, 42).matrix() != random_density(5, 3, 43).matrix());

  const auto rho = random_density(4, 2, 17);
  std::size_t above = 0;
  for (double v : rho.spectrum().values) above += v > 1e-10 ? 1 : 0;
  CHECK(above == 2);
  CHECK_THROWS_AS(random_density(3, 4, 1), Error);
  CHECK_THROWS_AS(random_density(3, 0, 1), Error);
}

TEST_CASE("slater_pair") {
  for (std::size_t n = 2; n <= 6; ++n) {
    const auto p = slater_pair(n);
    const double nd = static_cast<double>(n);
    CHECK(p.shape == TensorShape{n, n});
    CHECK(p.rho.rank(1e-10) == n * (n - 1) / 2);
    CHECK(max_abs_diff(p.sigma.matrix(), Matrix::identity(n * n) * (1.0 / (nd * nd))) == 0.0);
    const Matrix eye_n = Matrix::identity(n) * (1.0 / nd);
    CHECK(max_abs_diff(partial_trace(p.rho.matrix().matrix(), p.shape, {0}), eye_n) < 1e-10);
    CHECK(max_abs_diff(partial_trace(p.rho.matrix().matrix(), p.shape, {1}), eye_n) < 1e-10);
    // rho is a normalized projector: rho^2 = rho * 2/(N(N-1)).
    const Matrix sq = p.rho.matrix().matrix() * p.rho.matrix().matrix();
    CHECK(max_abs_diff(sq, p.rho.matrix().matrix() * (2.0 / (nd * (nd - 1.0)))) < 1e-15);
  }
  SECTION("N = 2 is the singlet") {
    const auto p = slater_pair(2);
    const auto singlet = pure_state({0.0, 1.0, -1.0, 0.0});
    CHECK(max_abs_diff(p.rho.matrix(), singlet.matrix()) < 1e-15);
  }
  CHECK_THROWS_AS(slater_pair(1), Error);
  CHECK_THROWS_AS(slater_pair(12), Error);
  CHECK_NOTHROW(slater_pair(11));
}

TEST_CASE("epsilon_mix") {
  const auto rho = random_density(4, 1, 3);
  CHECK(epsilon_mix(rho, 0.0).matrix() == rho.matrix());
  CHECK(max_abs_diff(epsilon_mix(rho, 1.0).matrix(), Matrix::identity(4) * 0.25) < 1e-15);
  for (double eps : {1e-6, 1e-3, 0.3}) CHECK(epsilon_mix(rho, eps).min_eigenvalue() >= eps / 4.0 * (1.0 - 1e-9));
  CHECK_THROWS_AS(epsilon_mix(rho, 1.5), Error);
}

TEST_CASE("channels") {
  const auto rho = random_density(3, 3, 8);
  SECTION("identity channel") {
    CHECK(max_abs_diff(apply_channel(KrausChannel::identity(3), rho).matrix(), rho.matrix()) < 1e-15);
  }
  SECTION("completely depolarizing channel") {
    const auto out = apply_channel(KrausChannel::completely_depolarizing(3, 2), rho);
    CHECK(max_abs_diff(out.matrix(), Matrix::identity(2) * 0.5) < 1e-15);
  }
  SECTION("partial trace as a Kraus channel") {
    const auto rho12 = random_density(6, 4, 9);
    const TensorShape shape{2, 3};
    for (std::size_t keep : {0u, 1u}) {
      const auto ch = KrausChannel::partial_trace(shape, {keep});
      CHECK(max_abs_diff(apply_channel(ch, rho12).matrix(), partial_trace(rho12.matrix().matrix(), shape, {keep})) <
            1e-15);
    }
  }
  SECTION("random channel is trace preserving and deterministic") {
    const auto ch = random_channel(3, 2, 4, 21);
    Matrix sum(3, 3);
    for (const auto& k : ch.kraus_ops()) sum += k.adjoint() * k;
    CHECK(max_abs_diff(sum, Matrix::identity(3)) < 1e-10);
    CHECK(ch.kraus_ops() == random_channel(3, 2, 4, 21).kraus_ops());
    const auto out = apply_channel(ch, rho);
    CHECK(std::abs(out.matrix().trace() - 1.0) < 1e-10);
    CHECK(out.min_eigenvalue() >= 0.0);
    CHECK(random_channel(1, 1, 1, 3).kraus_ops().front().max_abs() == Approx(1.0));
  }
  SECTION("errors") {
    CHECK_THROWS_AS(random_channel(9, 2, 4, 1), Error);
    CHECK_THROWS_AS(apply_channel(KrausChannel::identity(2), rho), Error);
    CHECK_THROWS_AS(KrausChannel(2, 2, {Matrix::identity(2) * 0.5}), Error);
  }
}

TEST_CASE("equality_family") {
  SECTION("single block with rho1 = sigma1 gives identical states") {
    BlockSpec spec;
    const auto r1 = random_density(2, 2, 4);
    spec.blocks.push_back({1.0, 1.0, 2, 2, r1, r1, std::nullopt});
    const auto inst = equality_family(spec, 5);
    CHECK(max_abs_diff(inst.rho12.matrix(), inst.sigma12.matrix()) == 0.0);
    CHECK(inst.residual < 1e-12);
  }
  SECTION("residual assertion holds for random specs up to four blocks") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      SplitMix64 rng(seed);
      const auto spec = random_block_spec(rng);
      const auto inst = equality_family(spec, seed * 7);
      CHECK(inst.residual <= 1e-8);
      CHECK(inst.shape.total() == inst.rho12.dim());
    }
  }
  SECTION("classical decomposition of D(rho1||sigma1) on commuting blocks") {
    using testing::diag_state;
    BlockSpec spec;
    spec.blocks.push_back({0.5, 0.25, 2, 2, diag_state({0.3, 0.7}), diag_state({0.6, 0.4}), diag_state({0.2, 0.8})});
    spec.blocks.push_back({0.5, 0.75, 2, 2, diag_state({0.9, 0.1}), diag_state({0.5, 0.5}), diag_state({0.5, 0.5})});
    const auto inst = equality_family(spec, 1);
    const auto rho1 = marginal(inst.rho12, inst.shape, {0});
    const auto sigma1 = marginal(inst.sigma12, inst.shape, {0});
    const double expected = 0.5 * std::log(0.5 / 0.25) + 0.5 * std::log(0.5 / 0.75) +
                            0.5 * testing::classical_kl({0.3, 0.7}, {0.6, 0.4}) +
                            0.5 * testing::classical_kl({0.9, 0.1}, {0.5, 0.5});
    CHECK(relative_entropy(rho1, sigma1).value() == Approx(expected).epsilon(1e-12));
    CHECK(relative_entropy(inst.rho12, inst.sigma12).value() == Approx(expected).epsilon(1e-12));
  }
  SECTION("invalid block structures") {
    BlockSpec spec;
    spec.blocks.push_back({0.5, 0.5, 2, 2, {}, {}, {}});
    CHECK_THROWS_AS(equality_family(spec, 1), Error);  // weights sum to 0.5
    spec.blocks.push_back({0.5, 0.5, 2, 3, {}, {}, {}});
    CHECK_THROWS_AS(equality_family(spec, 1), Error);  // right dims differ
    spec.blocks.back().right_dim = 2;
    spec.blocks.back().q = 0.0;
    spec.blocks.front().q = 1.0;
    CHECK_THROWS_AS(equality_family(spec, 1), Error);  // zero weight
    CHECK_THROWS_AS(equality_family(BlockSpec{}, 1), Error);
  }
}

TEST_CASE("every generator yields valid states") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const std::size_t d = 1 + seed % 9;
    CHECK_NOTHROW(validate_density(random_density(d, 1 + seed % d, seed).matrix()));
    CHECK_NOTHROW(validate_density(epsilon_mix(random_density(d, 1, seed), 0.1).matrix()));
    CHECK_NOTHROW(validate_density(apply_channel(random_channel(d, 2, d, seed), random_density(d, d, seed)).matrix()));
  }
  CHECK_NOTHROW(validate_density(ghz_state(3).matrix()));
  CHECK_NOTHROW(validate_density(maximally_entangled(3).matrix()));
}
