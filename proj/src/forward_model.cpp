#include "irgnh/forward_model.hpp"

namespace irgnh {

namespace {

class DiagonalLinearization final : public Linearization {
 public:
  DiagonalLinearization(const GridFunction& spectrum, GridFunction x)
      : spectrum_(spectrum), x_(std::move(x)), value_(spectrum.cwise_product(x_)) {}

  const GridFunction& point() const override { return x_; }
  const GridFunction& value() const override { return value_; }
  LinearMap derivative() const override { return diagonal_map(spectrum_); }
  CurriedSecondDerivative second_derivative(const GridFunction&) const override {
    auto zero = [](const GridFunction& h) { return GridFunction::zeros_like(h); };
    return {zero, zero};
  }

 private:
  GridFunction spectrum_;
  GridFunction x_;
  GridFunction value_;
};

class QuadraticLinearization final : public Linearization {
 public:
  QuadraticLinearization(GridFunction x, double curvature)
      : x_(std::move(x)), value_(x_), slope_(x_), curvature_(curvature) {
    value_.values() = x_.values() + 0.5 * curvature * x_.values().cwiseAbs2();
    slope_.values() = (1.0 + curvature * x_.values().array()).matrix();
  }

  const GridFunction& point() const override { return x_; }
  const GridFunction& value() const override { return value_; }
  LinearMap derivative() const override { return diagonal_map(slope_); }
  CurriedSecondDerivative second_derivative(const GridFunction& direction) const override {
    GridFunction scaled = curvature_ * direction;
    auto mult = [scaled](const GridFunction& h) { return scaled.cwise_product(h); };
    return {mult, mult};
  }

 private:
  GridFunction x_;
  GridFunction value_;
  GridFunction slope_;
  double curvature_;
};

}  // namespace

std::unique_ptr<Linearization> DiagonalLinearModel::do_linearize(const GridFunction& x) const {
  return std::make_unique<DiagonalLinearization>(spectrum_, x);
}

std::unique_ptr<Linearization> PointwiseQuadraticModel::do_linearize(const GridFunction& x) const {
  return std::make_unique<QuadraticLinearization>(x, curvature_);
}

}  // namespace irgnh
