#include <doctest.h>

#include <Eigen/Dense>

#include "irgnh/linear_map.hpp"

using namespace irgnh;

namespace {

LinearMap scalar_map(double s) {
  const Space one = Space::flat(1);
  return LinearMap(
      one, one, [s](const GridFunction& u) { return s * u; }, [s](const GridFunction& w) { return s * w; });
}

LinearMap dense_map(const Eigen::MatrixXd& M, const Eigen::MatrixXd& adjoint_matrix, double weight) {
  const Space dom = Space::flat(M.cols(), weight);
  const Space ran = Space::flat(M.rows(), weight);
  return LinearMap(
      dom, ran, [M, ran](const GridFunction& u) { return GridFunction(ran, M * u.values()); },
      [adjoint_matrix, dom](const GridFunction& w) { return GridFunction(dom, adjoint_matrix * w.values()); });
}

}  // namespace

TEST_CASE("Halley operator on a single node") {
  const LinearMap S = compose_halley_operator(
      scalar_map(2.0), [](const GridFunction& h) { return 3.0 * h; }, [](const GridFunction& w) { return 3.0 * w; });
  const GridFunction h(Space::flat(1), 1.7);
  CHECK(S.apply(h)[0] == doctest::Approx(3.5 * 1.7));
  CHECK(S.adjoint_apply(h)[0] == doctest::Approx(3.5 * 1.7));
}

TEST_CASE("composed Halley operator keeps a consistent adjoint") {
  Eigen::MatrixXd T = Eigen::MatrixXd::Random(6, 4);
  Eigen::MatrixXd B = Eigen::MatrixXd::Random(6, 4);
  const LinearMap Tm = dense_map(T, T.transpose(), 0.3);
  const Space dom = Tm.domain();
  const Space ran = Tm.range();
  const LinearMap S = compose_halley_operator(
      Tm, [B, ran](const GridFunction& h) { return GridFunction(ran, B * h.values()); },
      [B, dom](const GridFunction& w) { return GridFunction(dom, B.transpose() * w.values()); });
  CHECK(dot_product_test(S, 100, 3) <= 1e-12);
}

TEST_CASE("dot-product test separates right and wrong adjoints") {
  GridFunction diag(Space::flat(20, 0.05));
  for (Index i = 0; i < diag.size(); ++i) diag[i] = 1.0 + 0.1 * static_cast<double>(i);
  CHECK(dot_product_test(diagonal_map(diag), 100, 1) <= 1e-12);

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(5, 5);
  for (int i = 0; i + 1 < 5; ++i) M(i, i + 1) = 1.0 + i;
  M.diagonal().setConstant(0.5);
  CHECK(dot_product_test(dense_map(M, M, 1.0), 100, 1) > 1e-3);
  CHECK(dot_product_test(dense_map(M, M.transpose(), 1.0), 100, 1) <= 1e-12);
}

TEST_CASE("identity and space checks") {
  const Space s = Space::unit_square(3);
  const GridFunction v(s, 2.0);
  CHECK(identity_map(s).apply(v)[4] == 2.0);
  CHECK_THROWS_AS(identity_map(s).apply(GridFunction(Space::flat(9))), SpaceMismatch);
}
