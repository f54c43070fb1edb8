#include <doctest.h>

#include <cmath>

#include "irgnh/lemmas.hpp"

using namespace irgnh;

namespace {

// Independent partial sums of sum_m 2^(1 - sigma^m), stopped once terms
// underflow.
double series(double sigma) {
  double s = 0.0;
  for (int m = 0; m < 200; ++m) {
    const double term = std::exp2(1.0 - std::pow(sigma, m));
    if (term == 0.0) break;
    s += term;
  }
  return s;
}

}  // namespace

TEST_CASE("C(sigma) series") {
  CHECK(c_sigma(3.0).value == doctest::Approx(1.25390626).epsilon(1e-8));
  CHECK(c_sigma(3.0).value == doctest::Approx(1.0 + 0.25 + std::exp2(-8) + std::exp2(-26)).epsilon(1e-12));
  CHECK(c_sigma(2.0).value == doctest::Approx(series(2.0)).epsilon(1e-12));
  CHECK(c_sigma(2.0).value == doctest::Approx(1.6328430180).epsilon(1e-10));
  CHECK(c_sigma(1.2).value == doctest::Approx(series(1.2)).epsilon(1e-10));
  CHECK(c_sigma(3.0).tail_bound < 1e-12);
  CHECK_THROWS_AS(c_sigma(1.0), DomainError);
}

TEST_CASE("mu recursion values") {
  const auto mu = mu_recursion(RecursionParams{1.0, 3.0, 1.0, 0.0, 0.25, 1.0}, 2);
  CHECK(mu[1] == doctest::Approx(0.015625));
  const auto with_noise = mu_recursion(RecursionParams{2.0, 2.0, 1.5, 0.01, 0.1, 1.0}, 1);
  CHECK(with_noise[1] == doctest::Approx(2.0 * (0.01 + std::pow(0.01, 1.0 / 1.5))));
  CHECK_THROWS_AS(mu_recursion(RecursionParams{10.0, 4.0, 1.0, 0.0, 1e5, 1.0}, 20), std::overflow_error);
}

TEST_CASE("worked certificate instance") {
  const Lemma2Certificate cert = lemma2_certificate(RecursionParams{1.0, 3.0, 1.0, 0.0, 0.3535, 1.0}, 5);
  CHECK(cert.status == CertificateStatus::Pass);
  CHECK(cert.mu[1] == doctest::Approx(0.0442).epsilon(0.002));
  CHECK(cert.mu[1] <= 0.125);
  CHECK(cert.mu[2] == doctest::Approx(8.63e-5).epsilon(0.002));
  CHECK(cert.mu[2] <= std::exp2(-9));
}

TEST_CASE("boundary probe at the noise threshold") {
  for (auto variant : {Lemma2Variant::AsStated, Lemma2Variant::Corrected}) {
    RecursionParams rp{1.0, 3.0, 1.0, 0.0, 0.0, 1.0};
    rp.delta = lemma2_thresholds(1.0, 3.0, 1.0, 1.0, variant).delta_max;
    const Lemma2Certificate cert = lemma2_certificate(rp, 10, variant);
    CHECK(cert.status == CertificateStatus::Pass);
    CHECK(cert.worst_margin >= 0.0);
  }
}

TEST_CASE("parameters above the thresholds are rejected, not failed") {
  RecursionParams rp{1.0, 3.0, 1.0, 0.0, 0.9, 1.0};
  CHECK(lemma2_certificate(rp, 5).status == CertificateStatus::Rejected);
}

TEST_CASE("corrected ensemble never fails") {
  const Lemma2Ensemble corrected = lemma2_ensemble(1000, 7, 30, Lemma2Variant::Corrected);
  CHECK(corrected.failures == 0);
  CHECK(corrected.samples == 1000);
}

TEST_CASE("bound as stated fails for large constants with noise") {
  // C_hat = 4 > C(2) and a tiny admissible delta: mu_1 >= C_hat delta^(1/p)
  // already exceeds C(sigma) delta^(1/p).
  RecursionParams rp{4.0, 2.0, 1.0, 0.0, 0.0, 1.0};
  rp.delta = 1e-2 * lemma2_thresholds(4.0, 2.0, 1.0, 1.0).delta_max;
  const Lemma2Certificate stated = lemma2_certificate(rp, 10, Lemma2Variant::AsStated);
  CHECK(stated.status == CertificateStatus::Fail);
  CHECK(stated.first_failure.has_value());
  CHECK(lemma2_certificate(rp, 10, Lemma2Variant::Corrected).status == CertificateStatus::Pass);
}

TEST_CASE("two-sequence implication on a grid") {
  Lemma1Coefficients zero;
  CHECK(lemma1_certificate(zero, 0.2, 0.2).pass);

  Lemma1Coefficients small;
  small.a = small.d = 0.01;
  const Lemma1Certificate ok = lemma1_certificate(small, 0.2, 0.2);
  CHECK(ok.pass);
  CHECK(ok.qualifying > 0);

  Lemma1Coefficients large = small;
  large.d = 10.0;
  const Lemma1Certificate bad = lemma1_certificate(large, 0.1, 0.2);
  CHECK_FALSE(bad.pass);
  REQUIRE(bad.witness);
  CHECK(bad.witness->first > 0.1);

  Lemma1Coefficients invalid;
  invalid.p = 1.0;
  invalid.r = 2.0;
  CHECK_THROWS(invalid.validate());
}

TEST_CASE("sigma formula") {
  CHECK(sigma_formula(1.0, Method::Halley).sigma == doctest::Approx(3.0));
  CHECK(sigma_formula(1.0, Method::Irgnm).sigma == doctest::Approx(2.0));
  const SigmaFormula h = sigma_formula(1.5, Method::Halley);
  CHECK(h.sigma == doctest::Approx(3.5 / 2.25));
  REQUIRE(h.min_expression);
  CHECK(*h.min_expression == doctest::Approx((1.0 + 2.0 / 1.5) / 1.5));
  CHECK(sigma_formula(1.5, Method::Irgnm).sigma == doctest::Approx(4.0 / 3.0));
}
