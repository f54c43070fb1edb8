#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "irgnh/forward_model.hpp"
#include "irgnh/subproblem.hpp"

namespace irgnh {

enum class Method { Halley, Irgnm };

std::string_view to_string(Method method);

/// Q-order sigma of the exact-penalty regime: (p+2)/p^2 for Halley, 2/p for
/// IRGNM. Throws DomainError unless 1 <= p < 2.
double convergence_order(double p, Method method);

enum class ScheduleMode { GeometricDecay, Constant };

/// Regularization parameters alpha_k (second stage) and beta_k (first stage).
///   GeometricDecay: alpha_k = alpha0 q^-k, beta_k = s alpha_k.
///   Constant:       alpha_k = alpha_floor, beta_k = beta_floor.
struct Schedule {
  ScheduleMode mode = ScheduleMode::GeometricDecay;
  double alpha0 = 1.0;
  double q = 2.0;
  double s = 1.0;
  double alpha_floor = 1.0;
  double beta_floor = 1.0;

  static Schedule geometric(double alpha0, double q, double s = 1.0);
  static Schedule constant(double alpha_floor, double beta_floor);

  double alpha(int k) const;
  double beta(int k) const;
  void validate() const;
};

/// Membership of beta_k in [m alpha_k^(2/p), M alpha_k^(1/(p-1))] for
/// k = 0..k_max. Defaults m = s alpha0^(1-2/p), M = s alpha0^(1-1/(p-1))
/// make k = 0 tight on both sides.
struct WindowAudit {
  double m = 0.0;
  double M = 0.0;
  bool applicable = false;  ///< false in Constant mode
  bool holds = true;
  int first_violation = -1;
  double worst_lower_ratio = 0.0;  ///< min over k of beta_k / (m alpha_k^(2/p))
  double worst_upper_ratio = 0.0;  ///< min over k of M alpha_k^(1/(p-1)) / beta_k
};

WindowAudit audit_window(const Schedule& schedule, double p, int k_max,
                         std::optional<double> m = std::nullopt,
                         std::optional<double> M = std::nullopt);

/// Penalty reference of the second stage: x0 (default) or the current
/// iterate x_k as in the Levenberg-Marquardt-type variant.
enum class SecondStageReference { InitialGuess, CurrentIterate };

struct RunConfig {
  Method method = Method::Halley;
  ExponentConfig exponents = ExponentConfig::make(2.0, 2.0);
  Schedule schedule;
  double tau = 1.5;
  GridFunction x0;
  std::optional<GridFunction> truth;
  double delta = 0.0;
  /// Iteration cap for exact data (delta == 0).
  int max_iters = 25;
  SolverOptions solver;
  SecondStageReference second_reference = SecondStageReference::InitialGuess;
  /// Abort once error_x exceeds this multiple of the initial error.
  double divergence_factor = 10.0;

  void validate() const;
};

/// State of the iteration at index k. Step diagnostics (inner1/2,
/// error_mid, Gamma) refer to the step that produced x_k and are zero at k = 0.
struct IterationRecord {
  int k = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double residual = 0.0;   ///< ||F(x_k) - y_delta||_r
  double error_x = 0.0;    ///< ||x_k - x_true||_p, NaN without truth
  double error_mid = 0.0;  ///< ||x_{(k-1)+} - x_true||_p
  double gamma = 0.0;      ///< error_x / alpha_k^(1/(p(r-1))); unnormalized when r == 1
  double Gamma = 0.0;      ///< error_mid / beta_{k-1}^(1/(p(r-1))); 0 at k = 0
  SubproblemDiagnostics stage1;
  SubproblemDiagnostics stage2;
};

void write_records_csv(const std::vector<IterationRecord>& records, std::ostream& out);

struct StepResult {
  GridFunction x_mid;
  GridFunction x_next;
  SubproblemDiagnostics stage1;
  SubproblemDiagnostics stage2;
};

/// One Gauss-Newton-Halley step from lin.point() = x_k:
///   x_mid  = argmin (1/r)||T_k(x - x_k) + r_k||^r + (beta_k/p)||x - x0||^p
///   x_next = argmin (1/r)||S_k(x - x_k) + r_k||^r + (alpha_k/p)||x - x0||^p
/// with S_k = T_k + F''(x_k)(x_mid - x_k, .)/2. Uses only `lin`; no assembly.
StepResult halley_step(const Linearization& lin, const GridFunction& y_delta,
                       const RunConfig& config, int k);

/// First stage only: x_next = x_mid.
StepResult irgnm_step(const Linearization& lin, const GridFunction& y_delta,
                      const RunConfig& config, int k);

struct StoppingIndex {
  int k_star = 0;
  double tau_bar = 0.0;  ///< s^(1/(r-1)) tau for the equivalent beta form
};

/// Smallest k with alpha_k^(1/(r-1)) <= tau delta. nullopt for delta == 0.
std::optional<StoppingIndex> stopping_index_rgt1(const Schedule& schedule, double r, double tau,
                                                 double delta);

/// ceil(log_sigma(log2(delta^(-1/p)))), at least 1, for 0 < delta < 1.
int stopping_index_req1(double p, double delta, Method method);

enum class RunStatus { Completed, Diverged, SubproblemFailed };

std::string_view to_string(RunStatus status);

struct RunResult {
  RunStatus status = RunStatus::Completed;
  std::string message;
  std::vector<IterationRecord> records;
  GridFunction final_x;
  std::optional<int> k_star;  ///< set for noisy data
  long linearizations = 0;    ///< assemblies consumed by this run
};

/// Iterates until k_star (delta > 0) or config.max_iters (delta == 0). One
/// linearization per record. Never throws on numerical trouble; the status
/// and the partial records say what happened.
RunResult run(const ForwardModel& model, const GridFunction& y_delta, const RunConfig& config);

}  // namespace irgnh
