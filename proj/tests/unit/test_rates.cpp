#include <doctest.h>

#include <cmath>
#include <random>

#include "irgnh/lemmas.hpp"
#include "irgnh/rates.hpp"

using namespace irgnh;

TEST_CASE("source element arithmetic on one node") {
  // T = 2, v = 0.1, p = 2: x_true - x0 = J_2^{-1}(T v) = 0.2.
  const GridFunction tv(Space::flat(1), 2.0 * 0.1);
  CHECK(inverse_duality_map(tv, 2.0)[0] == doctest::Approx(0.2));
}

TEST_CASE("benchmark satisfies its source condition exactly") {
  for (double p : {1.5, 2.0}) {
    const DiagonalBenchmark b = build_source_exact_benchmark(8, p, 4.0, 0.1, 2.0);
    const GridFunction lhs = b.spectrum.cwise_product(b.v);
    const GridFunction rhs = duality_map(b.x_true - b.x0, p);
    CHECK((lhs.values() - rhs.values()).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(lp_norm(b.v, 2.0) == doctest::Approx(0.1));
    CHECK(b.spectrum[0] == 1.0);
    CHECK(b.spectrum[b.spectrum.size() - 1] == doctest::Approx(1e-4));
    const SourceConditionFit fit = source_condition_residual(diagonal_map(b.spectrum), b.x_true, b.x0, p);
    CHECK(fit.residual <= 1e-5);
  }
  CHECK_THROWS_AS(build_source_exact_benchmark(4, 1.0, 2.0, 0.1), DomainError);
}

TEST_CASE("random truth under a smoothing operator is far from the range") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  const Space s = Space::flat(64, 1.0 / 64.0);
  GridFunction d(s), x(s);
  for (Index i = 0; i < s.size; ++i) {
    d[i] = std::exp(-0.5 * static_cast<double>(i));
    x[i] = g(rng);
  }
  const SourceConditionFit fit = source_condition_residual(diagonal_map(d), x, GridFunction(s), 2.0, 200);
  CHECK(fit.residual > 0.1);
  CHECK(std::isfinite(fit.residual));
}

TEST_CASE("rate fit on synthetic power law") {
  const std::vector<double> deltas{1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<double> errors;
  for (double d : deltas) errors.push_back(3.0 * d);
  const RateFit fit = fit_rate(deltas, errors);
  CHECK(fit.slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(fit.residual <= 1e-12);
  CHECK_THROWS(fit_rate({1e-1}, {1.0}));
}

TEST_CASE("empirical order of the mu recursion") {
  const std::vector<double> mu = mu_recursion(RecursionParams{1.0, 3.0, 1.0, 0.0, 0.35, 1.0}, 4);
  const auto order = empirical_order(mu);
  REQUIRE(order);
  CHECK(*order == doctest::Approx(3.0).epsilon(0.05 / 3.0));
  CHECK_FALSE(empirical_order({0.5, 0.5, 0.6, 0.7}));
  CHECK_FALSE(empirical_order({0.5, 0.1}));
}

TEST_CASE("small diagonal sweep recovers the square-root rate") {
  RateStudyConfig cfg;
  cfg.workers = 2;
  cfg.seed = 5;
  const RateStudy study = run_rate_study(build_source_exact_benchmark(16, 2.0, 6.0, 0.1), cfg);
  CHECK(study.expected_slope == 0.5);
  CHECK(study.fit.slope == doctest::Approx(0.5).epsilon(0.2));
  for (const auto& pt : study.points) CHECK(pt.status == RunStatus::Completed);
}

TEST_CASE("Halley outpaces IRGNM on the scalar model") {
  const OrderReport halley = scalar_order_study(Method::Halley, ScalarOrderSetup{});
  const OrderReport irgnm = scalar_order_study(Method::Irgnm, ScalarOrderSetup{});
  REQUIRE(halley.order);
  REQUIRE(irgnm.order);
  CHECK(*halley.order > *irgnm.order);
  CHECK(*irgnm.order > 1.5);
}
