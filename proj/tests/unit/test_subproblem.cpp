#include <doctest.h>

#include <random>

#include "irgnh/subproblem.hpp"

using namespace irgnh;

namespace {

SubproblemSpec scalar_spec(double kappa, double p, double r, double t, double x0) {
  const Space one = Space::flat(1);
  // misfit K(x - xk) + rk = x - t with xk = 0
  return SubproblemSpec{identity_map(one), GridFunction(one, 0.0), GridFunction(one, -t), GridFunction(one, x0),
                        kappa, ExponentConfig::unchecked(p, r)};
}

}  // namespace

TEST_CASE("quadratic scalar instance") {
  const SubproblemSpec spec = scalar_spec(1.0, 2, 2, 2.0, 0.0);
  CHECK(solve(spec, SolverOptions{}).x[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(solve_oracle_quadratic(spec)[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("one-homogeneous misfit with quadratic penalty") {
  // min |x - 2| + (kappa/2) x^2: x = 2 when kappa * 2 <= 1, else x = 1/kappa.
  CHECK(solve(scalar_spec(0.2, 2, 1, 2.0, 0.0), SolverOptions{}).x[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(solve(scalar_spec(2.0, 2, 1, 2.0, 0.0), SolverOptions{}).x[0] == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("smoothed solver on a multi-node one-homogeneous problem") {
  // Separable: min sum w|x_i - t_i| + (kappa/2) w x_i^2 solved nodewise.
  const Space s = Space::flat(4, 0.25);
  GridFunction t(s);
  t.values() << 2.0, -0.3, 0.1, -4.0;
  const double kappa = 1.0;
  SubproblemSpec spec{identity_map(s), GridFunction(s), -1.0 * t, GridFunction(s), kappa,
                      ExponentConfig::unchecked(2, 1)};
  SolverOptions opt;
  opt.continuation_steps = 6;
  const GridFunction x = solve(spec, opt).x;
  for (Index i = 0; i < s.size; ++i) {
    const double expected = std::abs(kappa * t[i]) <= 1.0 ? t[i] : (t[i] > 0 ? 1.0 : -1.0) / kappa;
    CHECK(x[i] == doctest::Approx(expected).epsilon(1e-5));
  }
}

TEST_CASE("iterative solve matches the dense oracle for p = r = 2") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const Space s = Space::unit_square(4);
    GridFunction d(s), xk(s), rk(s), xr(s);
    for (Index i = 0; i < s.size; ++i) {
      d[i] = u(rng);
      xk[i] = g(rng);
      rk[i] = g(rng);
      xr[i] = g(rng);
    }
    const SubproblemSpec spec{diagonal_map(d), xk, rk, xr, u(rng), ExponentConfig::make(2, 2)};
    const GridFunction a = solve(spec, SolverOptions{}).x;
    const GridFunction b = solve_oracle_quadratic(spec);
    CHECK(lp_norm(a - b, 2) <= 1e-8 * lp_norm(b, 2));
  }
}

TEST_CASE("general exponents reach first-order optimality") {
  const Space s = Space::flat(6, 1.0 / 6.0);
  GridFunction d(s), rk(s);
  for (Index i = 0; i < s.size; ++i) {
    d[i] = 1.0 / (1.0 + static_cast<double>(i));
    rk[i] = std::cos(static_cast<double>(i));
  }
  const SubproblemSpec spec{diagonal_map(d), GridFunction(s), rk, GridFunction(s), 0.3, ExponentConfig::make(1.5, 1.25)};
  const auto res = solve(spec, SolverOptions{});
  CHECK(res.diagnostics.converged);
  CHECK(objective(spec, res.x) <= res.diagnostics.objective_start);
  // Perturbing the solution does not lower the objective.
  for (Index i = 0; i < s.size; ++i) {
    for (double step : {1e-4, -1e-4}) {
      GridFunction x = res.x;
      x[i] += step;
      CHECK(objective(spec, x) >= objective(spec, res.x) - 1e-12);
    }
  }
}

TEST_CASE("bad options and specs are rejected") {
  SolverOptions opt;
  opt.grad_tol = 0.0;
  CHECK_THROWS_AS(solve(scalar_spec(1, 2, 2, 1, 0), opt), std::invalid_argument);
  CHECK_THROWS_AS(solve(scalar_spec(0, 2, 2, 1, 0), SolverOptions{}), std::invalid_argument);
  CHECK_THROWS_AS(solve_oracle_quadratic(scalar_spec(1, 2, 1, 1, 0)), DomainError);
}
