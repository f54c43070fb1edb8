#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "irgnh/elliptic.hpp"
#include "irgnh/iteration.hpp"
#include "irgnh/noise.hpp"

namespace irgnh {

/// Diagonal linear problem T = diag(t) with t_i = 10^(-decades * i/(N-1)),
/// x0 = 0 and x_true = J_p^{-1}(T* v), so that T* v = J_p(x_true - x0) holds
/// exactly. v is constant with ||v||_{r*} = v_norm.
struct DiagonalBenchmark {
  GridFunction spectrum;
  GridFunction v;
  GridFunction x0;
  GridFunction x_true;
  double p = 2.0;
  double r = 2.0;

  DiagonalLinearModel model() const { return DiagonalLinearModel(spectrum); }
  GridFunction exact_data() const { return spectrum.cwise_product(x_true); }
};

/// Throws DomainError for p <= 1 (the duality map is not invertible).
DiagonalBenchmark build_source_exact_benchmark(int n, double p, double spectrum_decay, double v_norm,
                                               double r = 2.0);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< root-mean-square deviation in log coordinates
  int used = 0;
  int excluded = 0;       ///< points dropped for a zero error
};

/// Least squares on (log delta, log error). Needs two positive errors.
RateFit fit_rate(const std::vector<double>& deltas, const std::vector<double>& errors);

/// Median of log e_{k+1} / log e_k over the decreasing tail of terms in
/// (floor, 1). nullopt when fewer than three terms qualify.
std::optional<double> empirical_order(const std::vector<double>& errors, double floor = 1e-13);

struct RatePoint {
  double delta = 0.0;
  int k_star = 0;
  double error = 0.0;
  RunStatus status = RunStatus::Completed;
};

struct RateStudy {
  std::vector<RatePoint> points;
  RateFit fit;
  double expected_slope = 0.0;
};

struct RateStudyConfig {
  std::vector<double> deltas{1e-2, 1e-3, 1e-4, 1e-5};
  Method method = Method::Halley;
  SecondStageReference second_reference = SecondStageReference::InitialGuess;
  Schedule schedule = Schedule::geometric(1.0, 2.0, 1.0);
  double tau = 1.5;
  std::uint64_t seed = 0;
  SolverOptions solver;
  int workers = 1;

  void validate() const;
};

/// Any forward model with known truth and exact data y = F(x_true).
struct SweepProblem {
  const ForwardModel* model = nullptr;
  GridFunction x0;
  GridFunction x_true;
  GridFunction y;
  double p = 2.0;
  double r = 2.0;
};

/// Runs one inversion per delta (Gaussian noise rescaled to exactly delta in
/// L^r) on up to `workers` threads and fits the final errors against delta.
RateStudy run_rate_study(const SweepProblem& problem, const RateStudyConfig& config);
RateStudy run_rate_study(const DiagonalBenchmark& bench, const RateStudyConfig& config);

/// Exact-data run on F(x) = x + (curvature/2) x^2 (one node) with p = r = 1 and
/// a constant schedule. Collects |x_k - x_true| and its empirical order.
struct OrderReport {
  std::vector<double> errors;
  std::optional<double> order;
  RunStatus status = RunStatus::Completed;
};

struct ScalarOrderSetup {
  double curvature = 1.0;
  double x_true = 0.2;
  double x_start = 0.5;
  double alpha = 0.1;
  double beta = 0.1;
  int iterations = 6;
  SolverOptions solver = [] {
    SolverOptions o;
    o.continuation_steps = 12;
    return o;
  }();
};

OrderReport scalar_order_study(Method method, const ScalarOrderSetup& setup);

/// Coscos coefficient identification with impulsive noise, once with misfit
/// exponent r = 1.1 and once with r = 2 (p = 2, identical schedules).
struct CompareConfig {
  int n = 31;
  double xi = 0.1;
  double f_const = 4000.0;
  double g_const = 10.0;
  double c_bar = 5.0;
  NoiseSpec noise;
  Schedule schedule = Schedule::geometric(1.0, 2.0, 1.0);
  double tau = 1.5;
  double r_robust = 1.1;
  int max_iters = 25;
  SolverOptions solver;
  Method method = Method::Halley;
};

struct CompareRow {
  double r = 2.0;
  double delta = 0.0;
  std::optional<int> k_star;
  double error = 0.0;  ///< ||c_final - c_true||_2
  RunStatus status = RunStatus::Completed;
  std::string message;
  std::vector<IterationRecord> records;
  GridFunction c_final;
};

struct CompareReport {
  CompareRow robust;
  CompareRow quadratic;
  double ratio = 0.0;  ///< robust.error / quadratic.error
  bool flagged = false;  ///< some run ended early
  GridFunction c_true;
  GridFunction y;
  GridFunction y_delta;
};

CompareReport compare_misfit_norms(const CompareConfig& config);

struct SourceConditionFit {
  GridFunction v_hat;
  double residual = 0.0;  ///< ||T* v_hat - J_p(x_true - x0)|| / ||J_p(x_true - x0)||
  int iterations = 0;
};

/// Least-squares fit of T* v = J_p(x_true - x0) by CGLS.
SourceConditionFit source_condition_residual(const LinearMap& T, const GridFunction& x_true,
                                             const GridFunction& x0, double p, int max_iters = 0,
                                             double tol = 1e-13);

}  // namespace irgnh
