#pragma once

#include <atomic>
#include <memory>
#include <vector>

#include <Eigen/SparseCore>

#include "irgnh/forward_model.hpp"

namespace irgnh {

/// Clipped quadratic potential: lambda^2/2 on [-c_bar, c_bar], continued
/// linearly as c_bar(2|lambda| - c_bar)/2 outside, so it lies in W^{2,inf}.
class PotentialLaw {
 public:
  explicit PotentialLaw(double c_bar = 5.0);

  double c_bar() const { return c_bar_; }

  double value(double lambda) const;
  /// clamp(lambda, -c_bar, c_bar)
  double derivative(double lambda) const;
  /// 1 inside (-c_bar, c_bar), 0 outside, 0 at |lambda| == c_bar.
  double second_derivative(double lambda) const;

  GridFunction value(const GridFunction& c) const;
  GridFunction derivative(const GridFunction& c) const;
  GridFunction second_derivative(const GridFunction& c) const;

 private:
  double c_bar_;
};

/// Observation operator C: either the identity on all interior nodes or the
/// restriction to a node subset (adjoint zero-fills).
class Observation {
 public:
  static Observation full_interior() { return Observation{}; }
  static Observation mask(std::vector<Index> nodes);

  bool is_full() const { return !mask_; }
  const std::vector<Index>& nodes() const { return nodes_; }

  Space data_space(const Space& state_space) const;
  GridFunction observe(const GridFunction& u) const;
  GridFunction observe_adjoint(const GridFunction& w, const Space& state_space) const;

 private:
  bool mask_ = false;
  std::vector<Index> nodes_;
};

/// -Laplace(u) + Upsilon(c) u = f on (0,1)^2, u = g on the boundary.
struct PdeProblem {
  int n = 31;
  GridFunction f;
  double g = 10.0;
  PotentialLaw law{5.0};
  Observation observation;

  /// Constant source and boundary value on n x n interior nodes.
  static PdeProblem make(int n, double f_const = 4000.0, double g_const = 10.0,
                         double c_bar = 5.0, Observation observation = Observation::full_interior());

  Space space() const { return Space::unit_square(n); }
  Space data_space() const { return observation.data_space(space()); }
  void validate() const;
};

/// A(c) = -Laplace_h + diag(Upsilon(c)) assembled and Cholesky-factored once,
/// with the state u = G(c) cached. Copies share the factorization.
class FactorizedState {
 public:
  const GridFunction& coefficient() const;
  const GridFunction& state() const;
  const PotentialLaw& law() const;
  const Eigen::SparseMatrix<double>& matrix() const;

  /// A(c)^{-1} rhs with homogeneous Dirichlet data. A(c) is symmetric, so
  /// this is also the transpose solve.
  GridFunction solve(const GridFunction& rhs) const;

  /// ||A u - b|| / ||b|| for the cached state (absolute when b == 0).
  double pde_residual() const;

  long solve_count() const;

 private:
  friend FactorizedState assemble_and_factor(const PdeProblem&, const GridFunction&);
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Thrown when the sparse factorization breaks down.
class NumericalBreakdown : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

FactorizedState assemble_and_factor(const PdeProblem& problem, const GridFunction& c);

/// Number of assemble_and_factor calls in this process so far.
long assembly_count();

/// v1 = A(c)^{-1}(-Upsilon'(c) h u).
GridFunction solve_first(const FactorizedState& state, const GridFunction& direction);

/// v2 = A(c)^{-1}(-Upsilon'(c) h v1_l - Upsilon'(c) l v1_h - Upsilon''(c) h l u).
GridFunction solve_second(const FactorizedState& state, const GridFunction& dir_h,
                          const GridFunction& dir_l, const GridFunction& v1_h,
                          const GridFunction& v1_l);

/// T = C o solve_first with adjoint w -> -Upsilon'(c) u A(c)^{-1} C* w.
LinearMap derivative_map(const FactorizedState& state, const Observation& observation);

/// 1 + (5/2) xi (1 - cos 4 pi x1)(1 - cos 4 pi x2) on (0, 1/2)^2, 1 elsewhere.
GridFunction coscos_coefficient(int n, double xi);

/// Max-norm nodal error for u = sin(pi x1) sin(pi x2), c = 0, g = 0 and
/// f = 2 pi^2 u.
double manufactured_max_error(int n);

/// F = C o G for the elliptic problem. Each linearization assembles and
/// factors A(c) exactly once.
class EllipticModel final : public ForwardModel {
 public:
  explicit EllipticModel(PdeProblem problem);

  Space domain() const override { return problem_.space(); }
  Space range() const override { return problem_.data_space(); }
  const PdeProblem& problem() const { return problem_; }

 protected:
  std::unique_ptr<Linearization> do_linearize(const GridFunction& c) const override;

 private:
  PdeProblem problem_;
};

}  // namespace irgnh
