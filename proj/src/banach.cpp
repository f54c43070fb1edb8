#include "irgnh/banach.hpp"

#include <cmath>
#include <sstream>

namespace irgnh {

namespace {

void require_exponent(double p, const char* what) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    std::ostringstream msg;
    msg << what << ": exponent " << p << " must be >= 1";
    throw DomainError(msg.str());
  }
}

double sign(double t) { return static_cast<double>((t > 0.0) - (t < 0.0)); }

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::RateRgt1: return "rate_r_gt_1";
    case Regime::ExactPenalty: return "exact_penalty";
    case Regime::Unclassified: return "unclassified";
  }
  return "unknown";
}

double conjugate_exponent(double q) {
  if (q == 1.0) return std::numeric_limits<double>::infinity();
  return q / (q - 1.0);
}

ExponentConfig::ExponentConfig(double p, double r, Regime regime)
    : p_(p), r_(r), p_conj_(conjugate_exponent(p)), r_conj_(conjugate_exponent(r)), regime_(regime) {}

ExponentConfig ExponentConfig::make(double p, double r) {
  require_exponent(p, "ExponentConfig");
  require_exponent(r, "ExponentConfig");
  if (r > 1.0 && r <= p && p < 2.0 * r && p <= 2.0) return ExponentConfig(p, r, Regime::RateRgt1);
  if (r == 1.0 && p < 2.0) return ExponentConfig(p, r, Regime::ExactPenalty);
  std::ostringstream msg;
  msg << "exponents (p=" << p << ", r=" << r
      << ") satisfy neither 1 < r <= p < 2r, p <= 2 nor r = 1, 1 <= p < 2";
  throw DomainError(msg.str());
}

ExponentConfig ExponentConfig::unchecked(double p, double r) {
  require_exponent(p, "ExponentConfig");
  require_exponent(r, "ExponentConfig");
  return ExponentConfig(p, r, Regime::Unclassified);
}

double lp_norm_pow(const GridFunction& v, double p) {
  require_exponent(p, "lp_norm");
  const auto& x = v.values();
  double sum = 0.0;
  if (p == 1.0) {
    sum = x.cwiseAbs().sum();
  } else if (p == 2.0) {
    sum = x.squaredNorm();
  } else {
    for (Index i = 0; i < x.size(); ++i) sum += std::pow(std::abs(x[i]), p);
  }
  return v.weight() * sum;
}

double lp_norm(const GridFunction& v, double p) {
  const double s = lp_norm_pow(v, p);
  if (p == 1.0) return s;
  if (p == 2.0) return std::sqrt(s);
  return std::pow(s, 1.0 / p);
}

GridFunction duality_map(const GridFunction& v, double p) {
  require_exponent(p, "duality_map");
  GridFunction out(v.space());
  auto& y = out.values();
  const auto& x = v.values();
  if (p == 2.0) {
    y = x;
  } else if (p == 1.0) {
    for (Index i = 0; i < x.size(); ++i) y[i] = sign(x[i]);
  } else {
    for (Index i = 0; i < x.size(); ++i) y[i] = std::pow(std::abs(x[i]), p - 1.0) * sign(x[i]);
  }
  return out;
}

GridFunction inverse_duality_map(const GridFunction& v, double p) {
  require_exponent(p, "inverse_duality_map");
  if (p == 1.0) throw DomainError("inverse_duality_map: J_1 is not invertible");
  GridFunction out(v.space());
  const double e = 1.0 / (p - 1.0);
  for (Index i = 0; i < v.size(); ++i) out[i] = std::pow(std::abs(v[i]), e) * sign(v[i]);
  return out;
}

double bregman_shifted(const GridFunction& x_tilde, const GridFunction& x,
                       const GridFunction& x0, double p) {
  require_same_space(x_tilde.space(), x.space(), "bregman_shifted");
  require_same_space(x_tilde.space(), x0.space(), "bregman_shifted");
  const GridFunction shifted_tilde = x_tilde - x0;
  const GridFunction xi = duality_map(shifted_tilde, p);
  return lp_norm_pow(x - x0, p) / p - lp_norm_pow(shifted_tilde, p) / p - inner(xi, x - x_tilde);
}

double coercivity_margin(const GridFunction& x_tilde, const GridFunction& x,
                         const GridFunction& x0, double p) {
  const double denom = lp_norm_pow(x_tilde - x, p);
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return bregman_shifted(x_tilde, x, x0, p) / denom;
}

}  // namespace irgnh
