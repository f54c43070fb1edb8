#include "irgnh/iteration.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace irgnh {

std::string_view to_string(Method method) {
  return method == Method::Halley ? "halley" : "irgnm";
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Completed: return "completed";
    case RunStatus::Diverged: return "diverged";
    case RunStatus::SubproblemFailed: return "subproblem_failed";
  }
  return "unknown";
}

double convergence_order(double p, Method method) {
  if (!(p >= 1.0 && p < 2.0)) throw DomainError("convergence_order: requires 1 <= p < 2");
  return method == Method::Halley ? (p + 2.0) / (p * p) : 2.0 / p;
}

Schedule Schedule::geometric(double alpha0, double q, double s) {
  Schedule sch;
  sch.mode = ScheduleMode::GeometricDecay;
  sch.alpha0 = alpha0;
  sch.q = q;
  sch.s = s;
  sch.validate();
  return sch;
}

Schedule Schedule::constant(double alpha_floor, double beta_floor) {
  Schedule sch;
  sch.mode = ScheduleMode::Constant;
  sch.alpha_floor = alpha_floor;
  sch.beta_floor = beta_floor;
  sch.validate();
  return sch;
}

double Schedule::alpha(int k) const {
  return mode == ScheduleMode::Constant ? alpha_floor : alpha0 * std::pow(q, -k);
}

double Schedule::beta(int k) const {
  return mode == ScheduleMode::Constant ? beta_floor : s * alpha(k);
}

void Schedule::validate() const {
  if (mode == ScheduleMode::GeometricDecay) {
    if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) throw std::invalid_argument("Schedule: alpha0 must be positive");
    if (!(q > 1.0) || !std::isfinite(q)) throw std::invalid_argument("Schedule: q must exceed 1");
    if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("Schedule: s must be positive");
  } else {
    if (!(alpha_floor > 0.0) || !(beta_floor > 0.0))
      throw std::invalid_argument("Schedule: alpha_floor and beta_floor must be positive");
  }
}

WindowAudit audit_window(const Schedule& schedule, double p, int k_max, std::optional<double> m,
                         std::optional<double> M) {
  WindowAudit audit;
  if (schedule.mode != ScheduleMode::GeometricDecay) return audit;
  audit.applicable = true;
  const double a0 = schedule.alpha0;
  audit.m = m.value_or(schedule.s * std::pow(a0, 1.0 - 2.0 / p));
  // p == 1 sends the upper exponent to infinity; the upper bound is then vacuous.
  const bool has_upper = p > 1.0;
  audit.M = has_upper ? M.value_or(schedule.s * std::pow(a0, 1.0 - 1.0 / (p - 1.0)))
                      : std::numeric_limits<double>::infinity();
  audit.worst_lower_ratio = std::numeric_limits<double>::infinity();
  audit.worst_upper_ratio = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= k_max; ++k) {
    const double a = schedule.alpha(k);
    const double b = schedule.beta(k);
    const double lower = b / (audit.m * std::pow(a, 2.0 / p));
    const double upper = has_upper ? audit.M * std::pow(a, 1.0 / (p - 1.0)) / b
                                   : std::numeric_limits<double>::infinity();
    audit.worst_lower_ratio = std::min(audit.worst_lower_ratio, lower);
    audit.worst_upper_ratio = std::min(audit.worst_upper_ratio, upper);
    // Relative slack for the k = 0 equality cases.
    if ((lower < 1.0 - 1e-12 || upper < 1.0 - 1e-12) && audit.holds) {
      audit.holds = false;
      audit.first_violation = k;
    }
  }
  return audit;
}

void RunConfig::validate() const {
  schedule.validate();
  if (!(tau > 1.0)) throw std::invalid_argument("RunConfig: tau must exceed 1");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw std::invalid_argument("RunConfig: delta must be >= 0");
  if (max_iters < 0) throw std::invalid_argument("RunConfig: max_iters must be >= 0");
  if (!(divergence_factor > 1.0)) throw std::invalid_argument("RunConfig: divergence_factor must exceed 1");
  if (!x0.all_finite() || x0.size() == 0) throw std::invalid_argument("RunConfig: x0 missing or non-finite");
  if (truth) require_same_space(x0.space(), truth->space(), "RunConfig truth");
  const bool r_is_one = exponents.r() == 1.0;
  if (r_is_one && schedule.mode != ScheduleMode::Constant)
    throw std::invalid_argument("RunConfig: r = 1 requires the constant schedule");
  if (!r_is_one && schedule.mode != ScheduleMode::GeometricDecay)
    throw std::invalid_argument("RunConfig: r > 1 requires the geometric schedule");
  solver.validate();
}

void write_records_csv(const std::vector<IterationRecord>& records, std::ostream& out) {
  const auto old = out.precision(17);
  out << "k,alpha,beta,residual,error_x,error_mid,gamma,Gamma,inner1,inner2\n";
  for (const auto& r : records) {
    out << r.k << ',' << r.alpha << ',' << r.beta << ',' << r.residual << ',' << r.error_x << ','
        << r.error_mid << ',' << r.gamma << ',' << r.Gamma << ',' << r.stage1.inner_iters << ','
        << r.stage2.inner_iters << '\n';
  }
  out.precision(old);
}

namespace {

GridFunction data_residual(const Linearization& lin, const GridFunction& y_delta) {
  GridFunction rk = lin.value();
  rk -= y_delta;
  return rk;
}

SubproblemResult first_stage(const Linearization& lin, const LinearMap& T, const GridFunction& rk,
                             const RunConfig& config, int k) {
  SubproblemSpec spec{T, lin.point(), rk, config.x0, config.schedule.beta(k), config.exponents};
  return solve(spec, config.solver, lin.point());
}

}  // namespace

StepResult halley_step(const Linearization& lin, const GridFunction& y_delta, const RunConfig& config,
                       int k) {
  const GridFunction rk = data_residual(lin, y_delta);
  const LinearMap T = lin.derivative();
  SubproblemResult mid = first_stage(lin, T, rk, config, k);

  const CurriedSecondDerivative second = lin.second_derivative(mid.x - lin.point());
  const LinearMap S = compose_halley_operator(T, second.forward, second.adjoint);
  const GridFunction& ref =
      config.second_reference == SecondStageReference::InitialGuess ? config.x0 : lin.point();
  SubproblemSpec spec{S, lin.point(), rk, ref, config.schedule.alpha(k), config.exponents};
  SubproblemResult next = solve(spec, config.solver, mid.x);
  return {std::move(mid.x), std::move(next.x), mid.diagnostics, next.diagnostics};
}

StepResult irgnm_step(const Linearization& lin, const GridFunction& y_delta, const RunConfig& config,
                      int k) {
  const GridFunction rk = data_residual(lin, y_delta);
  SubproblemResult mid = first_stage(lin, lin.derivative(), rk, config, k);
  GridFunction next = mid.x;
  return {std::move(mid.x), std::move(next), mid.diagnostics, {}};
}

std::optional<StoppingIndex> stopping_index_rgt1(const Schedule& schedule, double r, double tau,
                                                 double delta) {
  if (!(r > 1.0)) throw DomainError("stopping_index_rgt1: requires r > 1");
  if (schedule.mode != ScheduleMode::GeometricDecay)
    throw DomainError("stopping_index_rgt1: requires the geometric schedule");
  if (!(tau > 0.0) || !(delta >= 0.0)) throw std::invalid_argument("stopping_index_rgt1: bad tau or delta");
  schedule.validate();
  if (delta == 0.0) return std::nullopt;
  const double target = tau * delta;
  const double e = 1.0 / (r - 1.0);
  int k = 0;
  while (std::pow(schedule.alpha(k), e) > target) {
    if (++k > 100000) throw DomainError("stopping_index_rgt1: stopping index out of range");
  }
  return StoppingIndex{k, std::pow(schedule.s, e) * tau};
}

int stopping_index_req1(double p, double delta, Method method) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("stopping_index_req1: requires 0 < delta < 1");
  const double sigma = convergence_order(p, method);
  const double levels = -std::log2(delta) / p;
  if (levels <= 1.0) return 1;
  // Small slack so exact powers (log_3 27) do not round up.
  const double k = std::ceil(std::log(levels) / std::log(sigma) - 1e-12);
  return std::max(1, static_cast<int>(k));
}

RunResult run(const ForwardModel& model, const GridFunction& y_delta, const RunConfig& config) {
  config.validate();
  require_same_space(model.domain(), config.x0.space(), "run x0");
  require_same_space(model.range(), y_delta.space(), "run data");

  const double p = config.exponents.p();
  const double r = config.exponents.r();
  RunResult result;
  int last = config.max_iters;
  if (config.delta > 0.0) {
    if (r > 1.0) {
      last = stopping_index_rgt1(config.schedule, r, config.tau, config.delta)->k_star;
    } else {
      last = stopping_index_req1(p, config.delta, config.method);
    }
    result.k_star = last;
  }

  // gamma/Gamma normalization exponent; r == 1 leaves them unnormalized.
  const double norm_exp = r > 1.0 ? 1.0 / (p * (r - 1.0)) : 0.0;
  const long start_count = model.linearizations();
  GridFunction x = config.x0;
  double e0 = 0.0;
  IterationRecord pending;  // step diagnostics for the next record

  for (int k = 0;; ++k) {
    std::unique_ptr<Linearization> lin;
    try {
      lin = model.linearize(x);
    } catch (const std::exception& ex) {
      result.status = RunStatus::SubproblemFailed;
      result.message = std::string("linearization failed at k = ") + std::to_string(k) + ": " + ex.what();
      break;
    }
    IterationRecord rec = pending;
    rec.k = k;
    rec.alpha = config.schedule.alpha(k);
    rec.beta = config.schedule.beta(k);
    rec.residual = lp_norm(data_residual(*lin, y_delta), r);
    if (config.truth) {
      rec.error_x = lp_norm(x - *config.truth, p);
      rec.gamma = rec.error_x / std::pow(rec.alpha, norm_exp);
      if (k == 0) e0 = rec.error_x;
    } else {
      rec.error_x = std::numeric_limits<double>::quiet_NaN();
      rec.gamma = std::numeric_limits<double>::quiet_NaN();
    }
    result.records.push_back(rec);

    if (config.truth && e0 > 0.0 && rec.error_x > config.divergence_factor * e0) {
      result.status = RunStatus::Diverged;
      result.message = "divergence guard: error " + std::to_string(rec.error_x) + " exceeds " +
                       std::to_string(config.divergence_factor) + " x initial error at k = " +
                       std::to_string(k);
      break;
    }
    if (!x.all_finite() || !std::isfinite(rec.residual)) {
      result.status = RunStatus::Diverged;
      result.message = "non-finite iterate at k = " + std::to_string(k);
      break;
    }
    if (k >= last) break;

    try {
      StepResult step = config.method == Method::Halley ? halley_step(*lin, y_delta, config, k)
                                                        : irgnm_step(*lin, y_delta, config, k);
      pending = IterationRecord{};
      pending.stage1 = step.stage1;
      pending.stage2 = step.stage2;
      if (config.truth) {
        pending.error_mid = lp_norm(step.x_mid - *config.truth, p);
        pending.Gamma = pending.error_mid / std::pow(rec.beta, norm_exp);
      }
      x = std::move(step.x_next);
    } catch (const SubproblemFailure& ex) {
      result.status = RunStatus::SubproblemFailed;
      result.message = std::string("k = ") + std::to_string(k) + ": " + ex.what();
      break;
    }
  }
  result.final_x = x;
  result.linearizations = model.linearizations() - start_count;
  return result;
}

}  // namespace irgnh
