#include "irgnh/linear_map.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "irgnh/banach.hpp"

namespace irgnh {

LinearMap::LinearMap(Space domain, Space range, Action forward, Action adjoint)
    : domain_(domain), range_(range), forward_(std::move(forward)), adjoint_(std::move(adjoint)) {
  if (!forward_ || !adjoint_) throw std::invalid_argument("LinearMap: missing action");
}

GridFunction LinearMap::apply(const GridFunction& u) const {
  require_same_space(domain_, u.space(), "LinearMap::apply");
  GridFunction out = forward_(u);
  require_same_space(range_, out.space(), "LinearMap::apply result");
  return out;
}

GridFunction LinearMap::adjoint_apply(const GridFunction& w) const {
  require_same_space(range_, w.space(), "LinearMap::adjoint_apply");
  GridFunction out = adjoint_(w);
  require_same_space(domain_, out.space(), "LinearMap::adjoint_apply result");
  return out;
}

LinearMap identity_map(const Space& space) {
  auto id = [](const GridFunction& v) { return v; };
  return LinearMap(space, space, id, id);
}

LinearMap diagonal_map(const GridFunction& diagonal) {
  auto scale = [diagonal](const GridFunction& v) { return diagonal.cwise_product(v); };
  return LinearMap(diagonal.space(), diagonal.space(), scale, scale);
}

LinearMap compose_halley_operator(const LinearMap& T, LinearMap::Action second_directional,
                                  LinearMap::Action second_directional_adjoint) {
  auto forward = [T, second = std::move(second_directional)](const GridFunction& h) {
    GridFunction out = T.apply(h);
    GridFunction correction = second(h);
    require_same_space(out.space(), correction.space(), "compose_halley_operator");
    out.values() += 0.5 * correction.values();
    return out;
  };
  auto adjoint = [T, second_adj = std::move(second_directional_adjoint)](const GridFunction& w) {
    GridFunction out = T.adjoint_apply(w);
    GridFunction correction = second_adj(w);
    require_same_space(out.space(), correction.space(), "compose_halley_operator adjoint");
    out.values() += 0.5 * correction.values();
    return out;
  };
  return LinearMap(T.domain(), T.range(), std::move(forward), std::move(adjoint));
}

double dot_product_test(const LinearMap& map, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("dot_product_test: trials must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_function = [&](const Space& space) {
    GridFunction v(space);
    for (Index i = 0; i < v.size(); ++i) v[i] = gauss(rng);
    return v;
  };
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const GridFunction u = random_function(map.domain());
    const GridFunction w = random_function(map.range());
    const GridFunction mu = map.apply(u);
    const GridFunction mw = map.adjoint_apply(w);
    const double lhs = inner(mu, w);
    const double rhs = inner(u, mw);
    const double scale = lp_norm(mu, 2.0) * lp_norm(w, 2.0) + std::numeric_limits<double>::epsilon();
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

}  // namespace irgnh
