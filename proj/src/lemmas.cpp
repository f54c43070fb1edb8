#include "irgnh/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace irgnh {

CSigma c_sigma(double sigma, double tol) {
  if (!(sigma > 1.0) || !std::isfinite(sigma)) throw DomainError("c_sigma: series diverges for sigma <= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("c_sigma: tol must be positive");
  CSigma out;
  double power = 1.0;  // sigma^m
  constexpr int kMaxTerms = 10'000'000;
  for (;;) {
    out.value += std::exp2(1.0 - power);
    ++out.terms;
    // Remainder after this term: sum_j 2^(1 - sigma^(M+j)) <= 2^(1-sigma^M) rho/(1 - rho),
    // rho = 2^(-sigma^M (sigma-1)).
    const double rho = std::exp2(-power * (sigma - 1.0));
    out.tail_bound = std::exp2(1.0 - power) * rho / (1.0 - rho);
    if (out.tail_bound < tol) break;
    if (out.terms >= kMaxTerms) throw DomainError("c_sigma: sigma too close to 1 for the requested tolerance");
    power *= sigma;
  }
  return out;
}

void RecursionParams::validate() const {
  if (!(C_hat > 0.0) || !std::isfinite(C_hat)) throw std::invalid_argument("RecursionParams: C_hat must be positive");
  if (!(sigma > 1.0) || !std::isfinite(sigma)) throw std::invalid_argument("RecursionParams: sigma must exceed 1");
  if (!(p >= 1.0 && p < 2.0)) throw std::invalid_argument("RecursionParams: p must lie in [1, 2)");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw std::invalid_argument("RecursionParams: delta must be >= 0");
  if (!(mu0 >= 0.0) || !std::isfinite(mu0)) throw std::invalid_argument("RecursionParams: mu0 must be >= 0");
  if (!(mu_bar > 0.0 && mu_bar <= 1.0)) throw std::invalid_argument("RecursionParams: mu_bar must lie in (0, 1]");
}

void to_json(nlohmann::json& j, const RecursionParams& params) {
  j = nlohmann::json{{"C_hat", params.C_hat}, {"sigma", params.sigma}, {"p", params.p},
                     {"delta", params.delta}, {"mu0", params.mu0},     {"mu_bar", params.mu_bar}};
}

std::vector<double> mu_recursion(const RecursionParams& params, int k_max) {
  params.validate();
  if (k_max < 0) throw std::invalid_argument("mu_recursion: k_max must be >= 0");
  std::vector<double> mu{params.mu0};
  const double noise = std::pow(params.delta, 1.0 / params.p);
  for (int k = 0; k < k_max; ++k) {
    const double next = params.C_hat * (std::pow(mu.back(), params.sigma) + noise);
    if (!std::isfinite(next)) throw std::overflow_error("mu_recursion: overflow at index " + std::to_string(k + 1));
    mu.push_back(next);
  }
  return mu;
}

std::string_view to_string(Lemma2Variant variant) {
  return variant == Lemma2Variant::AsStated ? "as_stated" : "corrected";
}

std::string_view to_string(CertificateStatus status) {
  switch (status) {
    case CertificateStatus::Pass: return "pass";
    case CertificateStatus::Fail: return "fail";
    case CertificateStatus::Rejected: return "rejected";
  }
  return "unknown";
}

Lemma2Thresholds lemma2_thresholds(double C_hat, double sigma, double p, double mu_bar,
                                   Lemma2Variant variant) {
  const double cs = c_sigma(sigma).value;
  const double two_c = 2.0 * C_hat;
  Lemma2Thresholds t;
  t.mu0_max = 0.5 * mu_bar * std::pow(two_c, -1.0 / (sigma - 1.0));
  if (variant == Lemma2Variant::AsStated) {
    t.delta_max = std::min(mu_bar * (1.0 - std::exp2(-sigma * sigma)) / cs,
                           0.5 * std::pow(two_c, -p * sigma / (sigma - 1.0)));
  } else {
    t.delta_max = std::min(std::pow(mu_bar * (1.0 - std::exp2(-sigma)) / (C_hat * cs), p),
                           std::pow(0.5 * std::pow(two_c, -sigma / (sigma - 1.0)), p));
  }
  return t;
}

Lemma2Certificate lemma2_certificate(const RecursionParams& params, int k_max, Lemma2Variant variant) {
  params.validate();
  Lemma2Certificate cert;
  cert.variant = variant;
  cert.params = params;
  const Lemma2Thresholds t = lemma2_thresholds(params.C_hat, params.sigma, params.p, params.mu_bar, variant);
  // Relative slack so inputs placed exactly on a threshold are admitted.
  if (params.mu0 > t.mu0_max * (1.0 + 1e-12) || params.delta > t.delta_max * (1.0 + 1e-12)) {
    cert.status = CertificateStatus::Rejected;
    return cert;
  }

  cert.mu = mu_recursion(params, k_max);
  const double cs = c_sigma(params.sigma).value;
  const double noise = std::pow(params.delta, 1.0 / params.p);
  const bool stated = variant == Lemma2Variant::AsStated;
  cert.worst_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < k_max; ++k) {
    const double mu = cert.mu[static_cast<std::size_t>(k + 1)];
    const double decay = std::exp2(-std::pow(params.sigma, k + 1));
    const double bound = stated ? decay + cs * noise : decay * params.mu_bar + params.C_hat * cs * noise;
    const double margin = std::min(bound - mu, params.mu_bar - mu);
    if (margin < cert.worst_margin) {
      cert.worst_margin = margin;
      cert.worst_index = k + 1;
    }
    const bool violated = mu > bound * (1.0 + 1e-12) || mu > params.mu_bar * (1.0 + 1e-12);
    if (violated && !cert.first_failure) cert.first_failure = k + 1;
  }
  cert.status = cert.first_failure ? CertificateStatus::Fail : CertificateStatus::Pass;
  return cert;
}

void to_json(nlohmann::json& j, const Lemma2Certificate& cert) {
  j = nlohmann::json{{"params", cert.params},
                     {"variant", to_string(cert.variant)},
                     {"status", to_string(cert.status)},
                     {"pass", cert.status == CertificateStatus::Pass},
                     {"worst_margin", cert.worst_margin},
                     {"worst_index", cert.worst_index},
                     {"mu", cert.mu}};
  j["first_failure"] = cert.first_failure ? nlohmann::json(*cert.first_failure) : nlohmann::json(nullptr);
}

Lemma2Ensemble lemma2_ensemble(int samples, std::uint64_t seed, int k_max, Lemma2Variant variant) {
  if (samples < 1) throw std::invalid_argument("lemma2_ensemble: samples must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Lemma2Ensemble out;
  out.worst_margin = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    RecursionParams params;
    // sigma is kept at least 1.01 so that C(sigma) stays summable in practice.
    params.sigma = 4.0 - 2.99 * unit(rng);
    params.p = 1.0 + unit(rng);
    params.C_hat = 0.5 + 9.5 * unit(rng);
    params.mu_bar = 1.0 - unit(rng);
    const Lemma2Thresholds t = lemma2_thresholds(params.C_hat, params.sigma, params.p, params.mu_bar, variant);
    params.mu0 = t.mu0_max * unit(rng);
    switch (s % 4) {
      case 0: params.delta = 0.0; break;
      case 1: params.delta = t.delta_max * unit(rng); break;
      case 2: params.delta = t.delta_max * std::pow(10.0, -6.0 * unit(rng)); break;
      default: params.delta = t.delta_max; break;
    }
    const Lemma2Certificate cert = lemma2_certificate(params, k_max, variant);
    ++out.samples;
    if (cert.status == CertificateStatus::Rejected) {
      ++out.rejected;
      continue;
    }
    out.worst_margin = std::min(out.worst_margin, cert.worst_margin);
    if (cert.status == CertificateStatus::Fail) {
      ++out.failures;
      if (!out.first_failure) out.first_failure = cert;
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const Lemma2Ensemble& ensemble) {
  j = nlohmann::json{{"samples", ensemble.samples},
                     {"failures", ensemble.failures},
                     {"rejected", ensemble.rejected},
                     {"worst_margin", ensemble.worst_margin}};
  j["first_failure"] = ensemble.first_failure ? nlohmann::json(*ensemble.first_failure) : nlohmann::json(nullptr);
}

double Lemma1Coefficients::phi(double gamma_bar, double Gamma) const {
  const double gr = std::pow(gamma_bar, r);
  return a + b * gr * gr + c * gr * std::pow(Gamma, r);
}

double Lemma1Coefficients::Phi(double gamma_bar, double gamma, double Gamma) const {
  const double gr = std::pow(gamma_bar, r);
  const double Gr = std::pow(Gamma, r);
  return d + e * gr * gr * gr + f * gr * Gr + (h * gr * gr + i * gr + j * Gr) * std::pow(gamma, r);
}

void Lemma1Coefficients::validate() const {
  for (double v : {a, b, c, d, e, f, h, i, j})
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("Lemma1Coefficients: coefficients must be >= 0");
  if (!(r >= 1.0 && r <= p && p <= 2.0 * r)) throw std::invalid_argument("Lemma1Coefficients: requires 1 <= r <= p <= 2r");
}

void to_json(nlohmann::json& j, const Lemma1Certificate& cert) {
  j = nlohmann::json{{"pass", cert.pass}, {"qualifying", cert.qualifying}};
  j["witness"] = cert.witness ? nlohmann::json{{"gamma", cert.witness->first}, {"Gamma", cert.witness->second}}
                              : nlohmann::json(nullptr);
}

Lemma1Certificate lemma1_certificate(const Lemma1Coefficients& coef, double gamma_bar, double Gamma_bar,
                                     int grid_points) {
  coef.validate();
  if (!(gamma_bar > 0.0) || !(Gamma_bar > 0.0)) throw std::invalid_argument("lemma1_certificate: bounds must be positive");
  if (grid_points < 100) throw std::invalid_argument("lemma1_certificate: grid_points must be >= 100");
  const double top = 10.0 * std::max(gamma_bar, Gamma_bar);
  std::vector<double> axis(static_cast<std::size_t>(grid_points));
  for (int k = 0; k < grid_points; ++k)
    axis[static_cast<std::size_t>(k)] = top * std::pow(10.0, -6.0 * (grid_points - 1 - k) / (grid_points - 1.0));

  Lemma1Certificate cert;
  for (double Gamma : axis) {
    if (std::pow(Gamma, coef.p) > coef.phi(gamma_bar, Gamma)) continue;
    for (double gamma : axis) {
      if (std::pow(gamma, coef.p) > coef.Phi(gamma_bar, gamma, Gamma)) continue;
      ++cert.qualifying;
      if ((Gamma > Gamma_bar || gamma > gamma_bar) && !cert.witness) {
        cert.pass = false;
        cert.witness = {gamma, Gamma};
      }
    }
  }
  return cert;
}

SigmaFormula sigma_formula(double p, Method method) {
  SigmaFormula out;
  out.sigma = convergence_order(p, method);
  if (method == Method::Halley && p > 1.0) {
    const double ps = p / (p - 1.0);
    const double m = std::min({2.0 * ps, ps, ps * ps, 3.0, 1.0 + ps / p, 1.0 + 2.0 / p});
    out.min_expression = m / p;
    if (std::abs(*out.min_expression - out.sigma) > 1e-12 * out.sigma)
      throw std::logic_error("sigma_formula: min-expression disagrees with (p+2)/p^2");
  }
  return out;
}

}  // namespace irgnh
