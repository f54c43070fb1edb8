#include "irgnh/rates.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace irgnh {

DiagonalBenchmark build_source_exact_benchmark(int n, double p, double spectrum_decay, double v_norm,
                                               double r) {
  if (!(p > 1.0 && p <= 2.0)) throw DomainError("build_source_exact_benchmark: requires 1 < p <= 2");
  if (!(r > 1.0)) throw DomainError("build_source_exact_benchmark: requires r > 1");
  if (!(v_norm > 0.0)) throw std::invalid_argument("build_source_exact_benchmark: v_norm must be positive");
  if (!(spectrum_decay >= 0.0)) throw std::invalid_argument("build_source_exact_benchmark: decay must be >= 0");
  if (n < 1) throw std::invalid_argument("build_source_exact_benchmark: n must be positive");

  const Space space = Space::unit_square(n);
  DiagonalBenchmark b;
  b.p = p;
  b.r = r;
  b.spectrum = GridFunction(space);
  const Index N = space.size;
  for (Index i = 0; i < N; ++i) {
    const double frac = N > 1 ? static_cast<double>(i) / static_cast<double>(N - 1) : 0.0;
    b.spectrum[i] = std::pow(10.0, -spectrum_decay * frac);
  }
  b.v = GridFunction(space, 1.0);
  b.v *= v_norm / lp_norm(b.v, conjugate_exponent(r));
  b.x0 = GridFunction(space);
  b.x_true = b.x0 + inverse_duality_map(b.spectrum.cwise_product(b.v), p);
  return b;
}

RateFit fit_rate(const std::vector<double>& deltas, const std::vector<double>& errors) {
  if (deltas.size() != errors.size()) throw std::invalid_argument("fit_rate: size mismatch");
  std::vector<double> xs, ys;
  RateFit fit;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0)) throw std::invalid_argument("fit_rate: deltas must be positive");
    if (errors[i] > 0.0 && std::isfinite(errors[i])) {
      xs.push_back(std::log(deltas[i]));
      ys.push_back(std::log(errors[i]));
    } else {
      ++fit.excluded;
    }
  }
  fit.used = static_cast<int>(xs.size());
  if (fit.used < 2) throw std::invalid_argument("fit_rate: fewer than two usable points");
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / fit.used;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / fit.used;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < fit.used; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_rate: deltas must not all coincide");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (int i = 0; i < fit.used; ++i) {
    const double d = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss += d * d;
  }
  fit.residual = std::sqrt(ss / fit.used);
  return fit;
}

std::optional<double> empirical_order(const std::vector<double>& errors, double floor) {
  std::size_t start = 0;
  while (start < errors.size() && !(errors[start] < 1.0 && errors[start] > floor)) ++start;
  std::vector<double> tail;
  for (std::size_t i = start; i < errors.size(); ++i) {
    const double e = errors[i];
    if (!(e > floor && e < 1.0)) break;
    if (!tail.empty() && !(e < tail.back())) break;
    tail.push_back(e);
  }
  if (tail.size() < 3) return std::nullopt;
  std::vector<double> ratios;
  for (std::size_t i = 0; i + 1 < tail.size(); ++i) ratios.push_back(std::log(tail[i + 1]) / std::log(tail[i]));
  std::sort(ratios.begin(), ratios.end());
  const std::size_t m = ratios.size();
  return m % 2 ? ratios[m / 2] : 0.5 * (ratios[m / 2 - 1] + ratios[m / 2]);
}

void RateStudyConfig::validate() const {
  if (deltas.size() < 2) throw std::invalid_argument("RateStudyConfig: need at least two deltas");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0)) throw std::invalid_argument("RateStudyConfig: deltas must be positive");
    if (i > 0 && !(deltas[i] < deltas[i - 1]))
      throw std::invalid_argument("RateStudyConfig: deltas must be strictly decreasing");
  }
  if (workers < 1) throw std::invalid_argument("RateStudyConfig: workers must be >= 1");
  schedule.validate();
  solver.validate();
}

RateStudy run_rate_study(const SweepProblem& problem, const RateStudyConfig& config) {
  config.validate();
  if (!problem.model) throw std::invalid_argument("run_rate_study: missing model");
  RateStudy study;
  study.expected_slope = 1.0 / problem.p;
  study.points.resize(config.deltas.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < config.deltas.size(); i = next++) {
      const double delta = config.deltas[i];
      NoiseSpec noise;
      noise.kind = NoiseKind::Gaussian;
      noise.sigma = 1.0;
      noise.seed = config.seed + i;
      const GridFunction y_delta =
          rescale_noise(problem.y, perturb(problem.y, noise, {}).y_delta, problem.r, delta);

      RunConfig rc;
      rc.method = config.method;
      rc.exponents = ExponentConfig::make(problem.p, problem.r);
      rc.schedule = config.schedule;
      rc.tau = config.tau;
      rc.x0 = problem.x0;
      rc.truth = problem.x_true;
      rc.delta = measure_delta(problem.y, y_delta, problem.r);
      rc.solver = config.solver;
      rc.second_reference = config.second_reference;
      const RunResult res = run(*problem.model, y_delta, rc);

      RatePoint& pt = study.points[i];
      pt.delta = delta;
      pt.k_star = res.k_star.value_or(-1);
      pt.error = lp_norm(res.final_x - problem.x_true, problem.p);
      pt.status = res.status;
    }
  };
  const int threads = std::min<int>(config.workers, static_cast<int>(config.deltas.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::vector<double> deltas, errors;
  for (const auto& pt : study.points) {
    deltas.push_back(pt.delta);
    errors.push_back(pt.error);
  }
  study.fit = fit_rate(deltas, errors);
  return study;
}

RateStudy run_rate_study(const DiagonalBenchmark& bench, const RateStudyConfig& config) {
  const DiagonalLinearModel model = bench.model();
  return run_rate_study(SweepProblem{&model, bench.x0, bench.x_true, bench.exact_data(), bench.p, bench.r},
                        config);
}

OrderReport scalar_order_study(Method method, const ScalarOrderSetup& setup) {
  const Space space = Space::flat(1);
  const PointwiseQuadraticModel model(space, setup.curvature);
  const GridFunction truth(space, setup.x_true);

  RunConfig rc;
  rc.method = method;
  rc.exponents = ExponentConfig::make(1.0, 1.0);
  rc.schedule = Schedule::constant(setup.alpha, setup.beta);
  rc.x0 = GridFunction(space, setup.x_start);
  rc.truth = truth;
  rc.delta = 0.0;
  rc.max_iters = setup.iterations;
  rc.solver = setup.solver;
  const RunResult res = run(model, model.evaluate(truth), rc);

  OrderReport report;
  report.status = res.status;
  for (const auto& rec : res.records) report.errors.push_back(rec.error_x);
  report.order = empirical_order(report.errors);
  return report;
}

namespace {

CompareRow invert_with_misfit(const EllipticModel& model, const CompareConfig& config, double r,
                              const GridFunction& y, const GridFunction& y_delta,
                              const GridFunction& c_true) {
  CompareRow row;
  row.r = r;
  row.delta = measure_delta(y, y_delta, r);
  RunConfig rc;
  rc.method = config.method;
  rc.exponents = ExponentConfig::make(2.0, r);
  rc.schedule = config.schedule;
  rc.tau = config.tau;
  rc.x0 = GridFunction(c_true.space(), 1.0);
  rc.truth = c_true;
  rc.delta = row.delta;
  rc.max_iters = config.max_iters;
  rc.solver = config.solver;
  RunResult res = run(model, y_delta, rc);
  row.k_star = res.k_star;
  row.status = res.status;
  row.message = res.message;
  row.error = lp_norm(res.final_x - c_true, 2.0);
  row.records = std::move(res.records);
  row.c_final = std::move(res.final_x);
  return row;
}

}  // namespace

CompareReport compare_misfit_norms(const CompareConfig& config) {
  if (config.noise.kind != NoiseKind::Impulsive)
    throw std::invalid_argument("compare_misfit_norms: requires impulsive noise");
  const EllipticModel model(PdeProblem::make(config.n, config.f_const, config.g_const, config.c_bar));
  CompareReport report;
  report.c_true = coscos_coefficient(config.n, config.xi);
  report.y = model.evaluate(report.c_true);
  report.y_delta = perturb(report.y, config.noise, {}).y_delta;

  report.robust = invert_with_misfit(model, config, config.r_robust, report.y, report.y_delta, report.c_true);
  report.quadratic = invert_with_misfit(model, config, 2.0, report.y, report.y_delta, report.c_true);
  report.ratio = report.quadratic.error > 0.0 ? report.robust.error / report.quadratic.error
                                              : std::numeric_limits<double>::infinity();
  report.flagged = report.robust.status != RunStatus::Completed ||
                   report.quadratic.status != RunStatus::Completed;
  return report;
}

SourceConditionFit source_condition_residual(const LinearMap& T, const GridFunction& x_true,
                                             const GridFunction& x0, double p, int max_iters,
                                             double tol) {
  require_same_space(T.domain(), x_true.space(), "source_condition_residual x_true");
  require_same_space(T.domain(), x0.space(), "source_condition_residual x0");
  const GridFunction b = duality_map(x_true - x0, p);
  SourceConditionFit fit{GridFunction(T.range()), 0.0, 0};
  const double bnorm = std::sqrt(inner(b, b));
  if (bnorm == 0.0) return fit;
  if (max_iters <= 0) max_iters = static_cast<int>(10 * std::max(T.range_dim(), Index{10}));

  // CGLS for min ||A v - b|| with A = T*, A* = T.
  GridFunction res = b;
  GridFunction s = T.apply(res);
  GridFunction dir = s;
  double gamma = inner(s, s);
  for (int k = 0; k < max_iters; ++k) {
    if (std::sqrt(inner(res, res)) <= tol * bnorm || gamma == 0.0) break;
    const GridFunction q = T.adjoint_apply(dir);
    const double qq = inner(q, q);
    if (!(qq > 0.0)) break;
    const double a = gamma / qq;
    fit.v_hat.values() += a * dir.values();
    res.values() -= a * q.values();
    s = T.apply(res);
    const double gamma_new = inner(s, s);
    dir.values() = s.values() + (gamma_new / gamma) * dir.values();
    gamma = gamma_new;
    fit.iterations = k + 1;
  }
  const GridFunction final_res = T.adjoint_apply(fit.v_hat) - b;
  fit.residual = std::sqrt(inner(final_res, final_res)) / bnorm;
  return fit;
}

}  // namespace irgnh
