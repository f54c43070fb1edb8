#pragma once

#include <atomic>
#include <memory>

#include "irgnh/linear_map.hpp"

namespace irgnh {

/// h -> F''(x)(direction, h) with `direction` fixed, plus its adjoint.
struct CurriedSecondDerivative {
  LinearMap::Action forward;
  LinearMap::Action adjoint;
};

/// Everything an outer iterate needs from the forward operator at one point:
/// the value F(x), the derivative T = F'(x), and curried second derivatives.
/// For PDE models all three share a single factorization.
class Linearization {
 public:
  virtual ~Linearization() = default;

  virtual const GridFunction& point() const = 0;
  virtual const GridFunction& value() const = 0;
  virtual LinearMap derivative() const = 0;
  virtual CurriedSecondDerivative second_derivative(const GridFunction& direction) const = 0;
};

/// Forward operator F: X -> Y. `linearize` is the only entry point that
/// assembles anything, and it is counted.
class ForwardModel {
 public:
  virtual ~ForwardModel() = default;

  virtual Space domain() const = 0;
  virtual Space range() const = 0;

  std::unique_ptr<Linearization> linearize(const GridFunction& x) const {
    require_same_space(domain(), x.space(), "ForwardModel::linearize");
    linearizations_.fetch_add(1, std::memory_order_relaxed);
    return do_linearize(x);
  }

  GridFunction evaluate(const GridFunction& x) const { return linearize(x)->value(); }

  /// Number of linearizations (one assembly/factorization each) so far.
  long linearizations() const { return linearizations_.load(std::memory_order_relaxed); }

 protected:
  virtual std::unique_ptr<Linearization> do_linearize(const GridFunction& x) const = 0;

 private:
  mutable std::atomic<long> linearizations_{0};
};

/// F(x) = diag(spectrum) x. Linear, so F'' vanishes.
class DiagonalLinearModel final : public ForwardModel {
 public:
  explicit DiagonalLinearModel(GridFunction spectrum) : spectrum_(std::move(spectrum)) {}

  Space domain() const override { return spectrum_.space(); }
  Space range() const override { return spectrum_.space(); }
  const GridFunction& spectrum() const { return spectrum_; }

 protected:
  std::unique_ptr<Linearization> do_linearize(const GridFunction& x) const override;

 private:
  GridFunction spectrum_;
};

/// Pointwise F(x)_i = x_i + (curvature/2) x_i^2; the scalar Halley test case
/// when the space has a single node.
class PointwiseQuadraticModel final : public ForwardModel {
 public:
  PointwiseQuadraticModel(Space space, double curvature) : space_(space), curvature_(curvature) {}

  Space domain() const override { return space_; }
  Space range() const override { return space_; }
  double curvature() const { return curvature_; }

 protected:
  std::unique_ptr<Linearization> do_linearize(const GridFunction& x) const override;

 private:
  Space space_;
  double curvature_;
};

}  // namespace irgnh
