#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "irgnh/iteration.hpp"

namespace irgnh {

/// Truncated C(sigma) = sum_{m>=0} 2^(1 - sigma^m).
struct CSigma {
  double value = 0.0;
  int terms = 0;            ///< number of summed terms
  double tail_bound = 0.0;  ///< bound on the neglected remainder
};

/// The remainder after M terms is bounded through sigma^(M+j) >= sigma^M (1 + j(sigma-1)),
/// a geometric series. Throws DomainError for sigma <= 1.
CSigma c_sigma(double sigma, double tol = 1e-12);

/// mu_{k+1} = C_hat (mu_k^sigma + delta^(1/p)).
struct RecursionParams {
  double C_hat = 1.0;
  double sigma = 3.0;
  double p = 1.0;
  double delta = 0.0;
  double mu0 = 0.0;
  double mu_bar = 1.0;

  void validate() const;
};

void to_json(nlohmann::json& j, const RecursionParams& params);

/// mu_0 .. mu_{k_max}. Throws std::overflow_error naming the index if a term
/// stops being finite.
std::vector<double> mu_recursion(const RecursionParams& params, int k_max);

/// Which smallness thresholds and bound the certificate checks.
///   AsStated:  mu0 <= (mu_bar/2)(2C)^(-1/(sigma-1)),
///              delta <= min{mu_bar(1 - 2^-sigma^2)/C(sigma), (1/2)(2C)^(-p sigma/(sigma-1))},
///              mu_{k+1} <= 2^-sigma^(k+1) + C(sigma) delta^(1/p) and mu_{k+1} <= mu_bar.
///   Corrected: same mu0 threshold,
///              delta <= min{(mu_bar(1 - 2^-sigma)/(C C(sigma)))^p, ((1/2)(2C)^(-sigma/(sigma-1)))^p},
///              mu_{k+1} <= 2^-sigma^(k+1) mu_bar + C C(sigma) delta^(1/p) and mu_{k+1} <= mu_bar.
enum class Lemma2Variant { AsStated, Corrected };

std::string_view to_string(Lemma2Variant variant);

struct Lemma2Thresholds {
  double mu0_max = 0.0;
  double delta_max = 0.0;
};

Lemma2Thresholds lemma2_thresholds(double C_hat, double sigma, double p, double mu_bar,
                                   Lemma2Variant variant = Lemma2Variant::AsStated);

enum class CertificateStatus { Pass, Fail, Rejected };

std::string_view to_string(CertificateStatus status);

struct Lemma2Certificate {
  CertificateStatus status = CertificateStatus::Pass;
  Lemma2Variant variant = Lemma2Variant::AsStated;
  RecursionParams params;
  double worst_margin = 0.0;  ///< min over k of min(bound - mu_{k+1}, mu_bar - mu_{k+1})
  int worst_index = -1;       ///< k+1 attaining worst_margin
  std::optional<int> first_failure;
  std::vector<double> mu;
};

void to_json(nlohmann::json& j, const Lemma2Certificate& cert);

Lemma2Certificate lemma2_certificate(const RecursionParams& params, int k_max,
                                     Lemma2Variant variant = Lemma2Variant::AsStated);

struct Lemma2Ensemble {
  int samples = 0;
  int failures = 0;
  int rejected = 0;
  double worst_margin = 0.0;
  std::optional<Lemma2Certificate> first_failure;
};

/// Seeded random admissible parameters: sigma in (1, 4], p in [1, 2),
/// C_hat in [0.5, 10], mu_bar in (0, 1], mu0 uniform below its threshold and
/// delta drawn from {0, uniform, log-uniform over six decades, threshold}.
Lemma2Ensemble lemma2_ensemble(int samples, std::uint64_t seed, int k_max = 30,
                               Lemma2Variant variant = Lemma2Variant::AsStated);

void to_json(nlohmann::json& j, const Lemma2Ensemble& ensemble);

/// phi(g, G)     = a + b g^(2r) + c g^r G^r
/// Phi(g, x, G)  = d + e g^(3r) + f g^r G^r + (h g^(2r) + i g^r + j G^r) x^r
struct Lemma1Coefficients {
  double a = 0, b = 0, c = 0, d = 0, e = 0, f = 0, h = 0, i = 0, j = 0;
  double p = 2.0;
  double r = 2.0;

  double phi(double gamma_bar, double Gamma) const;
  double Phi(double gamma_bar, double gamma, double Gamma) const;
  void validate() const;
};

struct Lemma1Certificate {
  bool pass = true;
  int qualifying = 0;  ///< grid points satisfying both hypotheses
  std::optional<std::pair<double, double>> witness;  ///< (gamma, Gamma) violating the conclusion
};

void to_json(nlohmann::json& j, const Lemma1Certificate& cert);

/// Checks the implication on a grid_points x grid_points logarithmic grid
/// over (0, 10 max(gamma_bar, Gamma_bar)]^2 spanning six decades.
Lemma1Certificate lemma1_certificate(const Lemma1Coefficients& coef, double gamma_bar, double Gamma_bar,
                                     int grid_points = 200);

struct SigmaFormula {
  double sigma = 0.0;
  std::optional<double> min_expression;  ///< Halley with p > 1 only
};

/// Halley: (p+2)/p^2, and for p > 1 the equivalent
/// min{2p*, p*, p*^2, 3, 1 + p*/p, 1 + 2/p}/p. IRGNM: 2/p.
SigmaFormula sigma_formula(double p, Method method);

}  // namespace irgnh
