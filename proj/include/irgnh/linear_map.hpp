#pragma once

#include <cstdint>
#include <functional>

#include "irgnh/grid_function.hpp"

namespace irgnh {

/// Matrix-free linear operator between two weighted grid spaces. The adjoint
/// is taken with respect to the weighted pairings of domain and range:
///   <apply(u), w>_range == <u, adjoint_apply(w)>_domain.
class LinearMap {
 public:
  using Action = std::function<GridFunction(const GridFunction&)>;

  LinearMap(Space domain, Space range, Action forward, Action adjoint);

  GridFunction apply(const GridFunction& u) const;
  GridFunction adjoint_apply(const GridFunction& w) const;

  const Space& domain() const { return domain_; }
  const Space& range() const { return range_; }
  Index domain_dim() const { return domain_.size; }
  Index range_dim() const { return range_.size; }

 private:
  Space domain_;
  Space range_;
  Action forward_;
  Action adjoint_;
};

LinearMap identity_map(const Space& space);

/// Pointwise multiplication by `diagonal` (self-adjoint on one space).
LinearMap diagonal_map(const GridFunction& diagonal);

/// S = T + 1/2 * second_directional, where second_directional is
/// h -> F''(x_k)(x_mid - x_k, h) with the first slot already fixed.
LinearMap compose_halley_operator(const LinearMap& T, LinearMap::Action second_directional,
                                  LinearMap::Action second_directional_adjoint);

/// Randomized adjoint check: max over trials of
///   |<Mu, w> - <u, M*w>| / (||Mu||_2 ||w||_2 + eps)
/// for Gaussian probes u, w. Deterministic for a given seed.
double dot_product_test(const LinearMap& map, int trials, std::uint64_t seed);

}  // namespace irgnh
