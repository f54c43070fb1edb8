#include <doctest.h>

#include <cmath>
#include <random>

#include "irgnh/banach.hpp"

using namespace irgnh;

namespace {

GridFunction one_node(double v, double weight = 1.0) { return GridFunction(Space::flat(1, weight), v); }

GridFunction random_vector(std::mt19937_64& rng, Index n, double weight) {
  std::normal_distribution<double> gauss;
  GridFunction v(Space::flat(n, weight));
  for (Index i = 0; i < n; ++i) v[i] = gauss(rng);
  return v;
}

}  // namespace

TEST_CASE("exponent regimes") {
  CHECK(ExponentConfig::make(2, 2).regime() == Regime::RateRgt1);
  CHECK(ExponentConfig::make(1.5, 1.25).regime() == Regime::RateRgt1);
  CHECK(ExponentConfig::make(1, 1).regime() == Regime::ExactPenalty);
  CHECK(ExponentConfig::make(1.9, 1).regime() == Regime::ExactPenalty);
  CHECK_THROWS_AS(ExponentConfig::make(2, 0.9), DomainError);
  CHECK_THROWS_AS(ExponentConfig::make(1.5, 2), DomainError);   // r > p
  CHECK_THROWS_AS(ExponentConfig::make(2.5, 2), DomainError);   // p > 2
  CHECK_THROWS_AS(ExponentConfig::make(2, 1), DomainError);     // r = 1 needs p < 2
  CHECK_THROWS_AS(ExponentConfig::make(2.2, 1.1), DomainError); // p >= 2r
  CHECK(ExponentConfig::unchecked(2, 1).regime() == Regime::Unclassified);
  CHECK(ExponentConfig::make(1.5, 1.25).p_conj() == doctest::Approx(3.0));
  CHECK(std::isinf(ExponentConfig::make(1, 1).r_conj()));
}

TEST_CASE("weighted norms") {
  const GridFunction v(Space::flat(2, 0.25), Eigen::Vector2d(3.0, -4.0));
  CHECK(lp_norm(v, 2) == doctest::Approx(std::sqrt(0.25 * 25.0)));
  CHECK(lp_norm(v, 1) == doctest::Approx(0.25 * 7.0));
  CHECK(lp_norm_pow(v, 1.5) == doctest::Approx(0.25 * (std::pow(3.0, 1.5) + std::pow(4.0, 1.5))));
  CHECK_THROWS_AS(lp_norm(v, 0.5), DomainError);
}

TEST_CASE("duality map pointwise values") {
  CHECK(duality_map(one_node(2.0), 1.5)[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(duality_map(one_node(-2.0), 1.5)[0] == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));
  CHECK(duality_map(one_node(0.0), 1.0)[0] == 0.0);
  CHECK(duality_map(one_node(-3.0), 1.0)[0] == -1.0);
  CHECK(inverse_duality_map(duality_map(one_node(0.7), 1.3), 1.3)[0] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK_THROWS_AS(inverse_duality_map(one_node(1.0), 1.0), DomainError);
}

TEST_CASE("duality pairing equals p-th power of the norm") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> pick_p(1.0, 2.0);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const double p = pick_p(rng);
    const GridFunction v = random_vector(rng, 25, 1.0 / 36.0);
    const double lhs = inner(duality_map(v, p), v);
    const double rhs = std::pow(lp_norm(v, p), p);
    worst = std::max(worst, std::abs(lhs - rhs) / rhs);
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("Bregman distance worked value") {
  // (1/p)(|x|^p - |x~|^p) - |x~|^(p-1) (x - x~) at p = 1.5, x~ = 1, x = 2.
  const double expected = (std::pow(2.0, 1.5) - 1.0) / 1.5 - 1.0;
  CHECK(expected == doctest::Approx(0.218951).epsilon(1e-6));
  CHECK(bregman_shifted(one_node(1.0), one_node(2.0), one_node(0.0), 1.5) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("Bregman distance is nonnegative") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pick_p(1.0, 2.0);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const double p = pick_p(rng);
    const GridFunction a = random_vector(rng, 10, 0.1);
    const GridFunction b = random_vector(rng, 10, 0.1);
    const GridFunction x0 = random_vector(rng, 10, 0.1);
    worst = std::min(worst, bregman_shifted(a, b, x0, p));
  }
  CHECK(worst >= -1e-14);
}

TEST_CASE("coercivity margin at p = 2 is one half") {
  std::mt19937_64 rng(9);
  double lo = 1.0, hi = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const GridFunction a = random_vector(rng, 8, 0.5);
    const GridFunction b = random_vector(rng, 8, 0.5);
    const GridFunction x0 = random_vector(rng, 8, 0.5);
    const double m = coercivity_margin(a, b, x0, 2.0);
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  CHECK(lo == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(hi == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::isinf(coercivity_margin(one_node(1), one_node(1), one_node(0), 2.0)));
}

TEST_CASE("mismatched spaces are rejected") {
  CHECK_THROWS_AS(inner(GridFunction(Space::flat(2)), GridFunction(Space::flat(3))), SpaceMismatch);
  CHECK_THROWS_AS(inner(GridFunction(Space::flat(2, 1.0)), GridFunction(Space::flat(2, 0.5))), SpaceMismatch);
}

TEST_CASE("csv and binary round trips") {
  const Space s = Space::unit_square(4);
  GridFunction v(s);
  for (Index i = 0; i < s.size; ++i) v[i] = std::sin(0.3 * static_cast<double>(i)) / 7.0;
  std::stringstream csv;
  write_csv(v, csv);
  const GridFunction back = read_csv(csv, s);
  CHECK((back.values() - v.values()).cwiseAbs().maxCoeff() == 0.0);
  std::stringstream bin;
  write_binary(v, bin);
  const GridFunction back2 = read_binary(bin);
  CHECK(back2.space() == s);
  CHECK((back2.values() - v.values()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("node coordinates run row-major with x1 fastest") {
  const Space s = Space::unit_square(3);
  const auto [x1, x2] = node_coordinates(s, 1);
  CHECK(x1 == doctest::Approx(0.5));
  CHECK(x2 == doctest::Approx(0.25));
  CHECK(s.weight == doctest::Approx(1.0 / 16.0));
}
