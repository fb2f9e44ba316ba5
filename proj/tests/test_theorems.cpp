#include <catch2/catch_amalgamated.hpp>

#include "qentropy/qentropy.hpp"
#include "test_support.hpp"

using namespace qentropy;
using Catch::Approx;
using testing::diag_state;
using testing::max_abs_diff;

namespace {

ErrorKind error_kind(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Parse;
}

}  // namespace

TEST_CASE("subadditivity certificate") {
  SECTION("product state saturates everything at zero") {
    const auto rho = product_state({random_density(2, 2, 1), random_density(3, 3, 2)});
    const auto c = subadditivity_certificate(rho, {2, 3});
    CHECK(c.pass());
    CHECK(c.lhs == Approx(0.0).margin(1e-12));
    CHECK(*c.bound("renyi") == Approx(0.0).margin(1e-12));
    CHECK(*c.bound("pinsker") == Approx(0.0).margin(1e-12));
  }
  SECTION("Bell state") {
    const auto c = subadditivity_certificate(maximally_entangled(2), {2, 2});
    CHECK(c.pass());
    CHECK(c.lhs == Approx(2.0 * std::log(2.0)));
    // sqrt overlap of the Bell state with I/4 is 1/2.
    CHECK(*c.bound("renyi") == Approx(2.0 * std::log(2.0)));
  }
  SECTION("Slater states saturate the Renyi bound") {
    for (std::size_t n = 2; n <= 10; ++n) {
      const auto p = slater_pair(n);
      const auto c = subadditivity_certificate(p.rho, p.shape);
      const double nd = static_cast<double>(n);
      CHECK(c.pass());
      CHECK(std::abs(*c.slack("renyi")) <= 1e-8);
      CHECK(*c.bound("pinsker") == Approx(0.5 * std::pow((nd + 1.0) / nd, 2)).margin(1e-10));
      CHECK(*c.bound("renyi") > *c.bound("pinsker"));
    }
    const auto p10 = slater_pair(10);
    const auto c10 = subadditivity_certificate(p10.rho, p10.shape);
    CHECK(*c10.bound("pinsker") == Approx(0.605).margin(1e-10));
    CHECK(*c10.bound("renyi") == Approx(0.7985076962177716).margin(1e-10));
    CHECK(*c10.bound("renyi") > std::log(2.0));
  }
  SECTION("residuals are tiny on random states") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const auto c = subadditivity_certificate(random_density(6, 1 + seed % 6, seed), {3, 2});
      CHECK(c.pass());
      CHECK(*c.residual("overlap_identity") <= 1e-10);
      CHECK(*c.residual("mutual_information_vs_divergence") <= 1e-9);
      CHECK(*c.slack("renyi_vs_hs") >= -1e-12);
    }
  }
  CHECK_THROWS_AS(subadditivity_certificate(ghz_state(3), {2, 2, 2}), Error);
}

TEST_CASE("multipartite certificate") {
  const auto ghz = multipartite_certificate(ghz_state(3), {2, 2, 2});
  CHECK(ghz.pass());
  CHECK(ghz.lhs == Approx(3.0 * std::log(2.0)));
  const auto prod = multipartite_certificate(
      product_state({random_density(2, 2, 1), random_density(2, 2, 2), random_density(2, 2, 3)}), {2, 2, 2});
  CHECK(prod.lhs == Approx(0.0).margin(1e-12));
  CHECK(*prod.bound("renyi") == Approx(0.0).margin(1e-12));
  for (std::uint64_t seed = 1; seed <= 30; ++seed) CHECK(multipartite_certificate(random_density(8, 3, seed), {2, 2, 2}).pass());
}

TEST_CASE("divergence bounds certificate") {
  const auto p3 = slater_pair(3);
  const auto c = divergence_bounds_certificate(p3.rho, p3.sigma);
  CHECK(c.pass());
  CHECK(std::abs(*c.slack("renyi_half")) <= 1e-9);
  CHECK(*c.bound("pinsker") == Approx(0.8888888888888888).margin(1e-12));

  SECTION("support violation passes flagged") {
    const auto inf = divergence_bounds_certificate(diag_state({0.5, 0.5}), diag_state({1.0, 0.0}));
    CHECK(inf.infinite_lhs);
    CHECK(inf.pass());
    CHECK_FALSE(inf.notes.empty());
  }
  SECTION("identical states") {
    const auto rho = random_density(3, 2, 4);
    const auto same = divergence_bounds_certificate(rho, rho);
    CHECK(same.pass());
    CHECK(same.lhs == Approx(0.0).margin(1e-10));
  }
}

TEST_CASE("monotonicity certificate") {
  SECTION("product states with a shared second factor saturate") {
    const auto tau = random_density(2, 2, 9);
    const auto rho12 = product_state({random_density(3, 3, 1), tau});
    const auto sigma12 = product_state({random_density(3, 3, 2), tau});
    const auto c = monotonicity_certificate(rho12, sigma12, {3, 2});
    CHECK(c.pass());
    CHECK(std::abs(c.lhs) <= 1e-10);
    CHECK(std::abs(*c.bound("remainder")) <= 1e-10);
    CHECK(*c.residual("log_difference") <= 1e-10);
  }
  SECTION("random full-rank pairs") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const auto rho = random_density(6, 6, seed), sigma = random_density(6, 6, seed + 500);
      const auto c = monotonicity_certificate(rho, sigma, {2, 3});
      CHECK(c.pass());
      CHECK(*c.slack("remainder") >= -1e-8);
      // Equality invariant: a small log-difference residual forces a small gap.
      if (*c.residual("log_difference") <= 1e-8) CHECK(std::abs(c.lhs) <= 1e-7);
    }
  }
  SECTION("rank-deficient inputs are refused with a hint") {
    const auto pure = pure_state({1.0, 0.0, 0.0, 0.0});
    const auto full = random_density(4, 4, 1);
    CHECK(error_kind([&] { (void)monotonicity_certificate(full, pure, {2, 2}); }) == ErrorKind::RankDeficient);
    try {
      (void)monotonicity_certificate(full, pure, {2, 2});
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("epsilon_mix") != std::string::npos);
    }
    CHECK_NOTHROW(monotonicity_certificate(full, epsilon_mix(pure, 1e-3), {2, 2}));
  }
}

TEST_CASE("equality family instances saturate monotonicity") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const auto c = replay_equality_trial(seed);
    CHECK(c.pass());
    CHECK(*c.residual("log_difference") <= 1e-8);
    CHECK(*c.residual("gap") <= 1e-7);
    CHECK(*c.residual("remainder") <= 1e-7);
    CHECK(*c.residual("petz") <= 1e-14);
  }
}

TEST_CASE("petz recovery") {
  SECTION("recovers rho12 from rho1") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto rho12 = random_density(6, 1 + seed % 6, seed);
      const TensorShape shape{2, 3};
      const auto back = petz_recovery(rho12, shape, marginal(rho12, shape, {0}));
      CHECK(max_abs_diff(back.matrix(), rho12.matrix()) <= 1e-9);
    }
  }
  SECTION("product input maps tau to tau ⊗ rho2") {
    const auto r1 = random_density(2, 2, 3), r2 = random_density(3, 2, 4), tau = random_density(2, 1, 5);
    const auto out = petz_recovery(product_state({r1, r2}), {2, 3}, tau);
    CHECK(max_abs_diff(out.matrix(), kron(tau.matrix(), r2.matrix())) <= 1e-10);
  }
  SECTION("tau outside the support is refused") {
    const auto rho12 = product_state({diag_state({1.0, 0.0}), random_density(2, 2, 6)});
    CHECK(error_kind([&] { (void)petz_recovery(rho12, {2, 2}, diag_state({0.5, 0.5})); }) ==
          ErrorKind::SupportViolation);
  }
}

TEST_CASE("gt3 certificate") {
  SECTION("maximally mixed inputs give lhs 1") {
    const auto c = gt3_certificate(maximally_mixed(2), maximally_mixed(2), maximally_mixed(6), {2, 3});
    CHECK(c.pass());
    CHECK(c.lhs == Approx(1.0).margin(1e-14));
    CHECK(*c.residual("integral_identity") <= 1e-14);
  }
  SECTION("commuting product inputs meet the integral") {
    const auto s1 = diag_state({0.2, 0.8}), s2 = diag_state({0.6, 0.4}), r1 = diag_state({0.7, 0.3});
    const auto c = gt3_certificate(r1, s1, product_state({s1, s2}), {2, 2});
    CHECK(c.lhs == Approx(1.0).margin(1e-13));
    CHECK(*c.bound("integral") == Approx(c.lhs).margin(1e-13));
  }
  SECTION("random inputs") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const TensorShape shape{2, 3};
      const auto sigma12 = random_density(6, 6, seed);
      const auto c = gt3_certificate(random_density(2, 2, seed + 1), marginal(sigma12, shape, {0}), sigma12, shape);
      CHECK(c.pass());
      CHECK(c.lhs <= 1.0 + 1e-8);
      CHECK(*c.residual("integral_identity") <= 1e-8);
    }
  }
  CHECK(error_kind([] {
          (void)gt3_certificate(maximally_mixed(2), diag_state({1.0, 0.0}), maximally_mixed(4), {2, 2});
        }) == ErrorKind::RankDeficient);
}

TEST_CASE("proofstep certificate") {
  const auto h = -1.0 * logm(random_density(3, 3, 1).matrix());
  SECTION("A = 0 gives lhs 1 with both bounds tight") {
    const auto c = proofstep_certificate(h, HermitianMatrix(Matrix(3, 3)));
    CHECK(c.pass());
    CHECK(c.lhs == Approx(1.0).margin(1e-12));
    CHECK(*c.bound("peierls_bogoliubov") == Approx(1.0).margin(1e-12));
    CHECK(*c.bound("golden_thompson") == Approx(1.0).margin(1e-12));
  }
  SECTION("commuting A makes Golden-Thompson an equality") {
    const auto c = proofstep_certificate(HermitianMatrix::diagonal({0.1, 1.0, 2.0}), HermitianMatrix::diagonal({0.3, -0.2, 1.0}));
    CHECK(std::abs(*c.slack("golden_thompson")) <= 1e-12);
    CHECK_FALSE(c.notes.empty());  // H was not normalized
    CHECK(c.pass());
  }
  SECTION("random A") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) CHECK(proofstep_certificate(h, random_hermitian(3, seed)).pass());
  }
}

TEST_CASE("data processing certificate") {
  const auto rho = random_density(4, 2, 1), sigma = random_density(4, 4, 2);
  const auto id = data_processing_certificate(rho, sigma, KrausChannel::identity(4));
  CHECK(std::abs(*id.slack("processed")) <= 1e-12);
  const auto tr = data_processing_certificate(rho, sigma, KrausChannel::partial_trace({2, 2}, {0}));
  CHECK(tr.pass());
  CHECK(*tr.bound("processed") ==
        Approx(relative_entropy(marginal(rho, {2, 2}, {0}), marginal(sigma, {2, 2}, {0})).value()).margin(1e-12));
  const auto dep = data_processing_certificate(rho, sigma, KrausChannel::completely_depolarizing(4, 3));
  CHECK(*dep.bound("processed") == Approx(0.0).margin(1e-12));
  for (std::uint64_t seed = 1; seed <= 30; ++seed)
    CHECK(data_processing_certificate(rho, sigma, random_channel(4, 2, 3, seed)).pass());
}

TEST_CASE("certificate verdict logic") {
  Certificate c;
  c.lhs = 1.0;
  c.add_lower_bound("a", 1.0 + 5e-9);
  CHECK(c.pass());
  c.add_lower_bound("b", 1.0 + 2e-8);
  CHECK_FALSE(c.pass());
  CHECK(c.min_slack() == Approx(-2e-8));

  Certificate r;
  r.residuals.push_back({"unlimited", 1.0, std::nullopt});
  CHECK(r.pass());
  r.residuals.push_back({"limited", 1e-7, 1e-8});
  CHECK_FALSE(r.pass());
}
