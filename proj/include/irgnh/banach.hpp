#pragma once

#include <limits>
#include <stdexcept>
#include <string_view>

#include "irgnh/grid_function.hpp"

namespace irgnh {

/// Raised for exponents or parameters outside an operation's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Which convergence regime an exponent pair (p, r) belongs to.
///   RateRgt1:     1 < r <= p < 2r and 1 <= p <= 2 (geometric schedule, a-priori stop).
///   ExactPenalty: r == 1 and 1 <= p < 2 (constant schedule, one-homogeneous misfit).
///   Unclassified: any p, r >= 1; only produced by ExponentConfig::unchecked.
enum class Regime { RateRgt1, ExactPenalty, Unclassified };

std::string_view to_string(Regime regime);

/// Banach exponents p (penalty, X = L^p) and r (misfit, Y = L^r) with their
/// conjugates. Conjugates of 1 are +infinity and never enter arithmetic.
class ExponentConfig {
 public:
  /// Classifies (p, r); throws DomainError if the pair is in neither regime.
  static ExponentConfig make(double p, double r);
  /// Accepts any p, r >= 1 without regime classification. Used for
  /// stand-alone subproblems such as the (p, r) = (2, 1) misfit test.
  static ExponentConfig unchecked(double p, double r);

  double p() const { return p_; }
  double r() const { return r_; }
  double p_conj() const { return p_conj_; }
  double r_conj() const { return r_conj_; }
  Regime regime() const { return regime_; }

 private:
  ExponentConfig(double p, double r, Regime regime);

  double p_ = 2.0;
  double r_ = 2.0;
  double p_conj_ = 2.0;
  double r_conj_ = 2.0;
  Regime regime_ = Regime::RateRgt1;
};

/// Conjugate exponent q/(q-1), +infinity for q == 1.
double conjugate_exponent(double q);

/// (sum_i weight * |v_i|^p)^(1/p).
double lp_norm(const GridFunction& v, double p);

/// sum_i weight * |v_i|^p, i.e. lp_norm(v, p)^p without the final root.
double lp_norm_pow(const GridFunction& v, double p);

/// Pointwise |v|^(p-1) sign(v) with sign(0) = 0: the gradient of
/// (1/p)||.||_p^p with respect to the weighted pairing.
GridFunction duality_map(const GridFunction& v, double p);

/// Inverse of duality_map for p > 1: pointwise |t|^(1/(p-1)) sign(t).
GridFunction inverse_duality_map(const GridFunction& v, double p);

/// Shifted Bregman distance of the penalty (1/p)||. - x0||^p between
/// x_tilde and x, with xi = duality_map(x_tilde - x0, p).
double bregman_shifted(const GridFunction& x_tilde, const GridFunction& x,
                       const GridFunction& x0, double p);

/// bregman_shifted / ||x_tilde - x||_p^p; +infinity when x_tilde == x.
double coercivity_margin(const GridFunction& x_tilde, const GridFunction& x,
                         const GridFunction& x0, double p);

}  // namespace irgnh
