#include "irgnh/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

namespace irgnh {

void SubproblemSpec::validate() const {
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw std::invalid_argument("SubproblemSpec: kappa must be positive");
  require_same_space(K.domain(), xk.space(), "SubproblemSpec xk");
  require_same_space(K.domain(), x_ref.space(), "SubproblemSpec x_ref");
  require_same_space(K.range(), rk.space(), "SubproblemSpec rk");
}

void SolverOptions::validate() const {
  if (!(grad_tol > 0.0)) throw std::invalid_argument("SolverOptions: grad_tol must be positive");
  if (!(smoothing_eps > 0.0)) throw std::invalid_argument("SolverOptions: smoothing_eps must be positive");
  if (!(continuation_factor > 0.0 && continuation_factor <= 1.0))
    throw std::invalid_argument("SolverOptions: continuation_factor must lie in (0, 1]");
  if (continuation_steps < 1) throw std::invalid_argument("SolverOptions: continuation_steps must be >= 1");
  if (max_inner_iters < 1 || max_cg_iters < 1)
    throw std::invalid_argument("SolverOptions: iteration budgets must be positive");
}

void to_json(nlohmann::json& j, const SubproblemDiagnostics& d) {
  j = nlohmann::json{{"inner_iters", d.inner_iters}, {"cg_iters", d.cg_iters},
                     {"stages", d.stages},           {"residual", d.residual},
                     {"tolerance", d.tolerance},     {"epsilon_final", d.epsilon_final},
                     {"objective", d.objective},     {"objective_start", d.objective_start},
                     {"converged", d.converged}};
}

double objective(const SubproblemSpec& spec, const GridFunction& x) {
  const double p = spec.exponents.p();
  const double r = spec.exponents.r();
  GridFunction misfit = spec.K.apply(x - spec.xk);
  misfit += spec.rk;
  return lp_norm_pow(misfit, r) / r + spec.kappa * lp_norm_pow(x - spec.x_ref, p) / p;
}

namespace {

/// phi(t) = (1/q)(t^2 + eps^2)^(q/2), the smoothed (1/q)|t|^q. For q == 2 the
/// smoothing is dropped since the term is already quadratic.
struct SmoothedPower {
  double q;
  double eps;

  bool exact() const { return q == 2.0; }

  double value(double t) const {
    if (exact()) return 0.5 * t * t;
    return std::pow(t * t + eps * eps, 0.5 * q) / q;
  }
  double derivative(double t) const {
    if (exact()) return t;
    return t * std::pow(t * t + eps * eps, 0.5 * q - 1.0);
  }
  double curvature(double t) const {
    if (exact()) return 1.0;
    const double s = t * t + eps * eps;
    return std::pow(s, 0.5 * q - 2.0) * (eps * eps + (q - 1.0) * t * t);
  }
};

double sum_value(const SmoothedPower& phi, const Eigen::VectorXd& t, double weight) {
  double s = 0.0;
  for (Index i = 0; i < t.size(); ++i) s += phi.value(t[i]);
  return weight * s;
}

Eigen::VectorXd map_derivative(const SmoothedPower& phi, const Eigen::VectorXd& t) {
  Eigen::VectorXd out(t.size());
  for (Index i = 0; i < t.size(); ++i) out[i] = phi.derivative(t[i]);
  return out;
}

Eigen::VectorXd map_curvature(const SmoothedPower& phi, const Eigen::VectorXd& t) {
  Eigen::VectorXd out(t.size());
  for (Index i = 0; i < t.size(); ++i) out[i] = phi.curvature(t[i]);
  return out;
}

double positive_scale(double candidate) { return candidate > 0.0 ? candidate : 1.0; }

class NewtonCg {
 public:
  NewtonCg(const SubproblemSpec& spec, const SolverOptions& options)
      : spec_(spec), options_(options) {}

  // Runs one continuation stage from x until the smoothed gradient drops
  // below `tolerance`. Returns true on success.
  bool minimize(GridFunction& x, const SmoothedPower& misfit, const SmoothedPower& penalty,
                double tolerance, SubproblemDiagnostics& diag) {
    const double wr = spec_.K.range().weight;
    const double wx = x.weight();
    for (int it = 0;; ++it) {
      GridFunction d = spec_.K.apply(x - spec_.xk);
      d += spec_.rk;
      const GridFunction shift = x - spec_.x_ref;

      GridFunction g = spec_.K.adjoint_apply(GridFunction(d.space(), map_derivative(misfit, d.values())));
      g.values() += spec_.kappa * map_derivative(penalty, shift.values());
      const double gnorm = lp_norm(g, 2.0);
      diag.residual = gnorm;
      if (gnorm <= tolerance) return true;
      if (it >= options_.max_inner_iters) return false;
      ++diag.inner_iters;

      const Eigen::VectorXd w_misfit = map_curvature(misfit, d.values());
      const Eigen::VectorXd w_penalty = spec_.kappa * map_curvature(penalty, shift.values());
      if (first_gnorm_ <= 0.0) first_gnorm_ = gnorm;
      // Exact quadratics get a tight linear solve; otherwise the forcing term
      // shrinks with the gradient for superlinear convergence.
      const double forcing =
          (misfit.exact() && penalty.exact()) ? 0.0 : std::min(0.1, gnorm / first_gnorm_);
      GridFunction step = conjugate_gradient(g, w_misfit, w_penalty,
                                             std::max(forcing * gnorm, 0.1 * tolerance), diag);

      auto phi_along = [&](const GridFunction& k_dir, const GridFunction& dir, double t) {
        const Eigen::VectorXd dt = d.values() + t * k_dir.values();
        const Eigen::VectorXd st = shift.values() + t * dir.values();
        return sum_value(misfit, dt, wr) + spec_.kappa * sum_value(penalty, st, wx);
      };
      auto line_search = [&](const GridFunction& dir, double slope) -> double {
        const GridFunction k_dir = spec_.K.apply(dir);
        const double phi0 = phi_along(k_dir, dir, 0.0);
        double t = 1.0;
        for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
          if (phi_along(k_dir, dir, t) <= phi0 + 1e-4 * t * slope) return t;
        }
        return 0.0;
      };

      double slope = inner(g, step);
      double t = slope < 0.0 ? line_search(step, slope) : 0.0;
      if (t == 0.0) {
        step = -g;
        t = line_search(step, -inner(g, g));
      }
      // No representable decrease along either direction: x is as good as it gets.
      if (t == 0.0) return false;
      x.values() += t * step.values();
    }
  }

 private:
  // Solves H s = -g with H v = K*(w_misfit . K v) + w_penalty . v, which is
  // self-adjoint in the weighted domain pairing.
  GridFunction conjugate_gradient(const GridFunction& g, const Eigen::VectorXd& w_misfit,
                                  const Eigen::VectorXd& w_penalty, double tol,
                                  SubproblemDiagnostics& diag) const {
    auto hessian = [&](const GridFunction& v) {
      GridFunction kv = spec_.K.apply(v);
      kv.values() = kv.values().cwiseProduct(w_misfit);
      GridFunction out = spec_.K.adjoint_apply(kv);
      out.values() += w_penalty.cwiseProduct(v.values());
      return out;
    };
    GridFunction s = GridFunction::zeros_like(g);
    GridFunction res = -g;
    GridFunction dir = res;
    double rr = inner(res, res);
    for (int k = 0; k < options_.max_cg_iters; ++k) {
      if (std::sqrt(rr) <= tol) break;
      const GridFunction hd = hessian(dir);
      const double curv = inner(dir, hd);
      ++diag.cg_iters;
      if (!(curv > 0.0)) break;
      const double a = rr / curv;
      s.values() += a * dir.values();
      res.values() -= a * hd.values();
      const double rr_new = inner(res, res);
      dir.values() = res.values() + (rr_new / rr) * dir.values();
      rr = rr_new;
    }
    return s;
  }

  const SubproblemSpec& spec_;
  const SolverOptions& options_;
  double first_gnorm_ = 0.0;
};


// One-dimensional domains: the objective is a convex function of a scalar, so
// its minimizer is the point where the right derivative changes sign. Bisecting
// on that sign needs no smoothing and resolves kinks to adjacent doubles.
GridFunction solve_scalar(const SubproblemSpec& spec, double start, SubproblemDiagnostics& diag) {
  const double p = spec.exponents.p();
  const double r = spec.exponents.r();
  GridFunction unit(spec.K.domain(), 1.0);
  const Eigen::VectorXd a = spec.K.apply(unit).values();
  GridFunction offset = spec.K.apply(-1.0 * spec.xk);
  offset += spec.rk;
  const Eigen::VectorXd b = offset.values();
  const double c = spec.x_ref[0];
  const double wr = spec.K.range().weight;
  const double wx = spec.K.domain().weight;

  // d/dx (1/q)|s x + t|^q from the right.
  auto right_slope = [](double s, double t, double x, double q) {
    const double u = s * x + t;
    if (u != 0.0) return s * std::copysign(std::pow(std::abs(u), q - 1.0), u);
    return q == 1.0 ? std::abs(s) : 0.0;
  };
  auto descending = [&](double x) {
    double g = spec.kappa * wx * right_slope(1.0, -c, x, p);
    for (Index i = 0; i < a.size(); ++i) g += wr * right_slope(a[i], b[i], x, r);
    return g < 0.0;
  };

  double step = std::max(1.0, std::abs(start));
  double lo = start;
  double hi = start;
  if (descending(start)) {
    do {
      lo = hi;
      hi = start + step;
      step *= 2.0;
      ++diag.inner_iters;
    } while (descending(hi) && std::isfinite(hi));
  } else {
    do {
      hi = lo;
      lo = start - step;
      step *= 2.0;
      ++diag.inner_iters;
    } while (!descending(lo) && std::isfinite(lo));
  }
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw SubproblemFailure("scalar subproblem: no bracket for the minimizer", GridFunction(spec.K.domain(), start),
                            diag);
  }
  // Invariant: descending(lo) or lo is the start; !descending(hi).
  for (int it = 0; it < 2200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (descending(mid) ? lo : hi) = mid;
    ++diag.inner_iters;
  }
  return GridFunction(spec.K.domain(), hi);
}

}  // namespace

SubproblemResult solve(const SubproblemSpec& spec, const SolverOptions& options,
                       const std::optional<GridFunction>& warm_start) {
  spec.validate();
  options.validate();
  const double p = spec.exponents.p();
  const double r = spec.exponents.r();

  GridFunction x = warm_start.value_or(spec.xk);
  require_same_space(spec.K.domain(), x.space(), "solve warm_start");

  SubproblemDiagnostics diag;
  const double rk_norm = lp_norm(spec.rk, r);
  diag.tolerance = options.grad_tol * ((r == 1.0 ? 1.0 : std::pow(rk_norm, r - 1.0)) + spec.kappa);
  diag.objective_start = objective(spec, x);

  // Smoothing scales: misfit relative to the residual size, penalty relative
  // to the distance of the start point from the reference.
  if (spec.K.domain_dim() == 1) {
    x = solve_scalar(spec, x[0], diag);
    diag.stages = 1;
    diag.converged = true;
    diag.residual = 0.0;
    diag.objective = objective(spec, x);
    return {std::move(x), diag};
  }

  const double data_scale = positive_scale(spec.rk.values().cwiseAbs().maxCoeff());
  const double param_scale = positive_scale(
      std::max((spec.xk - spec.x_ref).values().cwiseAbs().maxCoeff(),
               (x - spec.x_ref).values().cwiseAbs().maxCoeff()));
  const bool smooth = (r != 2.0) || (p != 2.0);
  const int stages = smooth ? options.continuation_steps : 1;

  NewtonCg newton(spec, options);
  bool converged = false;
  double factor = 1.0;
  for (int stage = 0; stage < stages; ++stage) {
    const SmoothedPower misfit{r, options.smoothing_eps * factor * data_scale};
    const SmoothedPower penalty{p, options.smoothing_eps * factor * param_scale};
    const bool last = stage + 1 == stages;
    const double tol = last ? diag.tolerance : 1e3 * diag.tolerance;
    converged = newton.minimize(x, misfit, penalty, tol, diag);
    diag.stages = stage + 1;
    diag.epsilon_final = misfit.exact() ? 0.0 : misfit.eps;
    factor *= options.continuation_factor;
  }
  diag.converged = converged;
  diag.objective = objective(spec, x);
  if (!converged) {
    std::ostringstream msg;
    msg << "subproblem did not converge: residual " << diag.residual << " > tolerance "
        << diag.tolerance << " after " << diag.inner_iters << " Newton iterations";
    throw SubproblemFailure(msg.str(), std::move(x), diag);
  }
  return {std::move(x), diag};
}

GridFunction solve_oracle_quadratic(const SubproblemSpec& spec) {
  spec.validate();
  if (spec.exponents.p() != 2.0 || spec.exponents.r() != 2.0)
    throw DomainError("solve_oracle_quadratic requires p = r = 2");
  const Index n = spec.K.domain_dim();
  const Index m = spec.K.range_dim();

  Eigen::MatrixXd forward(m, n);
  GridFunction probe(spec.K.domain());
  for (Index j = 0; j < n; ++j) {
    probe[j] = 1.0;
    forward.col(j) = spec.K.apply(probe).values();
    probe[j] = 0.0;
  }
  Eigen::MatrixXd adjoint(n, m);
  GridFunction data_probe(spec.K.range());
  for (Index i = 0; i < m; ++i) {
    data_probe[i] = 1.0;
    adjoint.col(i) = spec.K.adjoint_apply(data_probe).values();
    data_probe[i] = 0.0;
  }

  Eigen::MatrixXd normal = adjoint * forward;
  normal.diagonal().array() += spec.kappa;
  const Eigen::VectorXd rhs =
      adjoint * (forward * spec.xk.values() - spec.rk.values()) + spec.kappa * spec.x_ref.values();
  return GridFunction(spec.K.domain(), normal.partialPivLu().solve(rhs));
}

}  // namespace irgnh
