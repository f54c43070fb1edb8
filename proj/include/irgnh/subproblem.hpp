#pragma once

#include <optional>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "irgnh/banach.hpp"
#include "irgnh/linear_map.hpp"

namespace irgnh {

/// One Tikhonov step
///   min_x (1/r)||K(x - xk) + rk||_r^r + (kappa/p)||x - x_ref||_p^p.
struct SubproblemSpec {
  LinearMap K;
  GridFunction xk;
  GridFunction rk;
  GridFunction x_ref;
  double kappa = 1.0;
  ExponentConfig exponents = ExponentConfig::make(2.0, 2.0);

  /// Throws std::invalid_argument on kappa <= 0 or misplaced grids.
  void validate() const;
};

struct SolverOptions {
  /// Initial smoothing scale, relative to the size of the residual (misfit
  /// term) and of x - x_ref (penalty term). Only exponents below 2 are smoothed.
  double smoothing_eps = 1e-2;
  double continuation_factor = 0.1;
  int continuation_steps = 3;
  /// Relative gradient tolerance; the absolute stopping threshold on the
  /// smoothed optimality residual is grad_tol * (||rk||_r^(r-1) + kappa).
  double grad_tol = 1e-8;
  /// Newton iterations allowed per continuation stage.
  int max_inner_iters = 200;
  int max_cg_iters = 2000;

  void validate() const;
};

struct SubproblemDiagnostics {
  int inner_iters = 0;
  int cg_iters = 0;
  int stages = 0;
  double residual = 0.0;       ///< final smoothed optimality residual (weighted L2)
  double tolerance = 0.0;      ///< threshold the residual was held to
  double epsilon_final = 0.0;  ///< final misfit smoothing scale (0 when r == 2)
  double objective = 0.0;      ///< unsmoothed objective at the returned x
  double objective_start = 0.0;
  bool converged = false;
};

void to_json(nlohmann::json& j, const SubproblemDiagnostics& d);

struct SubproblemResult {
  GridFunction x;
  SubproblemDiagnostics diagnostics;
};

/// Raised when the inner solver exhausts its budget. Carries the best iterate.
class SubproblemFailure : public std::runtime_error {
 public:
  SubproblemFailure(const std::string& what, GridFunction best, SubproblemDiagnostics diagnostics)
      : std::runtime_error(what), best_(std::move(best)), diagnostics_(diagnostics) {}

  const GridFunction& best_iterate() const { return best_; }
  double residual() const { return diagnostics_.residual; }
  const SubproblemDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  GridFunction best_;
  SubproblemDiagnostics diagnostics_;
};

/// Unsmoothed objective value at x.
double objective(const SubproblemSpec& spec, const GridFunction& x);

/// Smoothed Newton-CG with backtracking and epsilon continuation. The
/// returned x satisfies
///   ||K* J_r^eps(K(x - xk) + rk) + kappa J_p^eps(x - x_ref)||_2 <= tolerance
/// at the final smoothing scale.
SubproblemResult solve(const SubproblemSpec& spec, const SolverOptions& options = {},
                       const std::optional<GridFunction>& warm_start = std::nullopt);

/// Closed-form reference for p = r = 2: assembles K and K* densely by probing
/// and solves (K*K + kappa I) x = K*(K xk - rk) + kappa x_ref with LU.
GridFunction solve_oracle_quadratic(const SubproblemSpec& spec);

}  // namespace irgnh
