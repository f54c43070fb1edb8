#include "irgnh/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/SparseCholesky>

namespace irgnh {

PotentialLaw::PotentialLaw(double c_bar) : c_bar_(c_bar) {
  if (!(c_bar > 0.0) || !std::isfinite(c_bar))
    throw std::invalid_argument("PotentialLaw: c_bar must be positive");
}

double PotentialLaw::value(double lambda) const {
  const double a = std::abs(lambda);
  if (a <= c_bar_) return 0.5 * lambda * lambda;
  return 0.5 * c_bar_ * (2.0 * a - c_bar_);
}

double PotentialLaw::derivative(double lambda) const { return std::clamp(lambda, -c_bar_, c_bar_); }

double PotentialLaw::second_derivative(double lambda) const {
  return std::abs(lambda) < c_bar_ ? 1.0 : 0.0;
}

namespace {

template <class Fn>
GridFunction pointwise(const GridFunction& c, Fn fn) {
  GridFunction out = GridFunction::zeros_like(c);
  for (Index i = 0; i < c.size(); ++i) out[i] = fn(c[i]);
  return out;
}

}  // namespace

GridFunction PotentialLaw::value(const GridFunction& c) const {
  return pointwise(c, [this](double v) { return value(v); });
}
GridFunction PotentialLaw::derivative(const GridFunction& c) const {
  return pointwise(c, [this](double v) { return derivative(v); });
}
GridFunction PotentialLaw::second_derivative(const GridFunction& c) const {
  return pointwise(c, [this](double v) { return second_derivative(v); });
}

Observation Observation::mask(std::vector<Index> nodes) {
  if (nodes.empty()) throw std::invalid_argument("Observation::mask: empty node set");
  std::sort(nodes.begin(), nodes.end());
  if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
    throw std::invalid_argument("Observation::mask: duplicate node index");
  if (nodes.front() < 0) throw std::invalid_argument("Observation::mask: negative node index");
  Observation obs;
  obs.mask_ = true;
  obs.nodes_ = std::move(nodes);
  return obs;
}

Space Observation::data_space(const Space& state_space) const {
  if (!mask_) return state_space;
  if (nodes_.back() >= state_space.size)
    throw std::invalid_argument("Observation::mask: node index outside the grid");
  return Space::flat(static_cast<Index>(nodes_.size()), state_space.weight);
}

GridFunction Observation::observe(const GridFunction& u) const {
  if (!mask_) return u;
  GridFunction out(data_space(u.space()));
  for (std::size_t i = 0; i < nodes_.size(); ++i) out[static_cast<Index>(i)] = u[nodes_[i]];
  return out;
}

GridFunction Observation::observe_adjoint(const GridFunction& w, const Space& state_space) const {
  require_same_space(data_space(state_space), w.space(), "Observation::observe_adjoint");
  if (!mask_) return w;
  GridFunction out(state_space);
  for (std::size_t i = 0; i < nodes_.size(); ++i) out[nodes_[i]] = w[static_cast<Index>(i)];
  return out;
}

PdeProblem PdeProblem::make(int n, double f_const, double g_const, double c_bar,
                            Observation observation) {
  PdeProblem problem{n, GridFunction(Space::unit_square(n), f_const), g_const, PotentialLaw(c_bar),
                     std::move(observation)};
  problem.validate();
  return problem;
}

void PdeProblem::validate() const {
  if (n < 3) throw std::invalid_argument("PdeProblem: n must be at least 3");
  require_same_space(space(), f.space(), "PdeProblem source");
  if (!f.all_finite() || !std::isfinite(g)) throw std::invalid_argument("PdeProblem: non-finite data");
  (void)data_space();
}

struct FactorizedState::Impl {
  Impl(const GridFunction& coefficient, const GridFunction& source, const PotentialLaw& potential)
      : c(coefficient), u(coefficient.space()), rhs(source), law(potential),
        A(coefficient.size(), coefficient.size()) {}

  GridFunction c;
  GridFunction u;
  GridFunction rhs;
  PotentialLaw law;
  Eigen::SparseMatrix<double> A;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
  mutable std::atomic<long> solves{0};
};

const GridFunction& FactorizedState::coefficient() const { return impl_->c; }
const GridFunction& FactorizedState::state() const { return impl_->u; }
const PotentialLaw& FactorizedState::law() const { return impl_->law; }
const Eigen::SparseMatrix<double>& FactorizedState::matrix() const { return impl_->A; }
long FactorizedState::solve_count() const { return impl_->solves.load(std::memory_order_relaxed); }

GridFunction FactorizedState::solve(const GridFunction& rhs) const {
  require_same_space(impl_->c.space(), rhs.space(), "FactorizedState::solve");
  impl_->solves.fetch_add(1, std::memory_order_relaxed);
  Eigen::VectorXd x = impl_->llt.solve(rhs.values());
  return GridFunction(rhs.space(), std::move(x));
}

double FactorizedState::pde_residual() const {
  const double scale = impl_->rhs.values().norm();
  const double res = (impl_->A * impl_->u.values() - impl_->rhs.values()).norm();
  return scale > 0.0 ? res / scale : res;
}

namespace {
std::atomic<long> g_assemblies{0};
}  // namespace

long assembly_count() { return g_assemblies.load(std::memory_order_relaxed); }

FactorizedState assemble_and_factor(const PdeProblem& problem, const GridFunction& c) {
  g_assemblies.fetch_add(1, std::memory_order_relaxed);
  problem.validate();
  const Space space = problem.space();
  require_same_space(space, c.space(), "assemble_and_factor coefficient");
  if (!c.all_finite()) throw std::invalid_argument("assemble_and_factor: non-finite coefficient");

  const int n = problem.n;
  const double h = 1.0 / (n + 1);
  const double inv_h2 = 1.0 / (h * h);
  const GridFunction reaction = problem.law.value(c);

  auto impl = std::make_shared<FactorizedState::Impl>(c, problem.f, problem.law);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(5 * space.size));
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      const Index idx = static_cast<Index>(row) * n + col;
      triplets.emplace_back(idx, idx, 4.0 * inv_h2 + reaction[idx]);
      const int nbr[4][2] = {{row, col - 1}, {row, col + 1}, {row - 1, col}, {row + 1, col}};
      for (const auto& rc : nbr) {
        if (rc[0] < 0 || rc[0] >= n || rc[1] < 0 || rc[1] >= n) {
          impl->rhs[idx] += problem.g * inv_h2;
        } else {
          triplets.emplace_back(idx, static_cast<Index>(rc[0]) * n + rc[1], -inv_h2);
        }
      }
    }
  }
  impl->A.setFromTriplets(triplets.begin(), triplets.end());
  impl->llt.compute(impl->A);
  if (impl->llt.info() != Eigen::Success)
    throw NumericalBreakdown("assemble_and_factor: Cholesky factorization failed");
  impl->u = GridFunction(space, impl->llt.solve(impl->rhs.values()));
  if (!impl->u.all_finite()) throw NumericalBreakdown("assemble_and_factor: non-finite state");

  FactorizedState state;
  state.impl_ = std::move(impl);
  return state;
}

GridFunction solve_first(const FactorizedState& state, const GridFunction& direction) {
  const GridFunction& u = state.state();
  GridFunction rhs = -state.law().derivative(state.coefficient()).cwise_product(direction).cwise_product(u);
  return state.solve(rhs);
}

GridFunction solve_second(const FactorizedState& state, const GridFunction& dir_h,
                          const GridFunction& dir_l, const GridFunction& v1_h,
                          const GridFunction& v1_l) {
  const GridFunction d1 = state.law().derivative(state.coefficient());
  const GridFunction d2 = state.law().second_derivative(state.coefficient());
  GridFunction rhs = d1.cwise_product(dir_h).cwise_product(v1_l);
  rhs += d1.cwise_product(dir_l).cwise_product(v1_h);
  rhs += d2.cwise_product(dir_h).cwise_product(dir_l).cwise_product(state.state());
  return state.solve(-rhs);
}

LinearMap derivative_map(const FactorizedState& state, const Observation& observation) {
  const Space space = state.coefficient().space();
  const GridFunction scale = -state.law().derivative(state.coefficient()).cwise_product(state.state());
  auto forward = [state, observation](const GridFunction& h) {
    return observation.observe(solve_first(state, h));
  };
  auto adjoint = [state, observation, scale, space](const GridFunction& w) {
    return scale.cwise_product(state.solve(observation.observe_adjoint(w, space)));
  };
  return LinearMap(space, observation.data_space(space), forward, adjoint);
}

GridFunction coscos_coefficient(int n, double xi) {
  if (n < 3) throw std::invalid_argument("coscos_coefficient: n must be at least 3");
  const Space space = Space::unit_square(n);
  GridFunction c(space, 1.0);
  constexpr double four_pi = 4.0 * std::numbers::pi;
  for (Index i = 0; i < space.size; ++i) {
    const auto [x1, x2] = node_coordinates(space, i);
    if (x1 < 0.5 && x2 < 0.5)
      c[i] += 2.5 * xi * (1.0 - std::cos(four_pi * x1)) * (1.0 - std::cos(four_pi * x2));
  }
  return c;
}

double manufactured_max_error(int n) {
  using std::numbers::pi;
  PdeProblem problem = PdeProblem::make(n, 0.0, 0.0);
  const Space space = problem.space();
  GridFunction exact(space);
  for (Index i = 0; i < space.size; ++i) {
    const auto [x1, x2] = node_coordinates(space, i);
    exact[i] = std::sin(pi * x1) * std::sin(pi * x2);
    problem.f[i] = 2.0 * pi * pi * exact[i];
  }
  const FactorizedState state = assemble_and_factor(problem, GridFunction(space));
  return (state.state().values() - exact.values()).cwiseAbs().maxCoeff();
}

namespace {

class EllipticLinearization final : public Linearization {
 public:
  EllipticLinearization(const PdeProblem& problem, const GridFunction& c)
      : state_(assemble_and_factor(problem, c)),
        observation_(problem.observation),
        value_(observation_.observe(state_.state())) {}

  const GridFunction& point() const override { return state_.coefficient(); }
  const GridFunction& value() const override { return value_; }
  LinearMap derivative() const override { return derivative_map(state_, observation_); }

  // With d fixed: h -> C v2(d, h) = C A^{-1}(D2 h + D3 h + D1 v1_h), v1_h = A^{-1}(D0 h),
  // where D0 = -Y'(c)u, D1 = -Y'(c)d, D2 = -Y'(c)v1_d, D3 = -Y''(c)d u.
  CurriedSecondDerivative second_derivative(const GridFunction& d) const override {
    const Space space = state_.coefficient().space();
    const GridFunction v1_d = solve_first(state_, d);
    const FactorizedState state = state_;
    const Observation obs = observation_;
    auto forward = [state, obs, d, v1_d](const GridFunction& h) {
      return obs.observe(solve_second(state, d, h, v1_d, solve_first(state, h)));
    };
    const GridFunction y1 = state_.law().derivative(state_.coefficient());
    const GridFunction y2 = state_.law().second_derivative(state_.coefficient());
    const GridFunction d0 = -y1.cwise_product(state_.state());
    const GridFunction d1 = -y1.cwise_product(d);
    const GridFunction d23 = -(y1.cwise_product(v1_d) + y2.cwise_product(d).cwise_product(state_.state()));
    auto adjoint = [state, obs, space, d0, d1, d23](const GridFunction& w) {
      const GridFunction z = state.solve(obs.observe_adjoint(w, space));
      GridFunction out = d0.cwise_product(state.solve(d1.cwise_product(z)));
      out += d23.cwise_product(z);
      return out;
    };
    return {forward, adjoint};
  }

 private:
  FactorizedState state_;
  Observation observation_;
  GridFunction value_;
};

}  // namespace

EllipticModel::EllipticModel(PdeProblem problem) : problem_(std::move(problem)) { problem_.validate(); }

std::unique_ptr<Linearization> EllipticModel::do_linearize(const GridFunction& c) const {
  return std::make_unique<EllipticLinearization>(problem_, c);
}

}  // namespace irgnh
