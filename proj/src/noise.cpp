#include "irgnh/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "irgnh/banach.hpp"

namespace irgnh {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::Impulsive: return "impulsive";
    case NoiseKind::Gaussian: return "gaussian";
    case NoiseKind::Uniform: return "uniform";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "impulsive") return NoiseKind::Impulsive;
  if (name == "gaussian") return NoiseKind::Gaussian;
  if (name == "uniform") return NoiseKind::Uniform;
  throw std::invalid_argument("unknown noise kind '" + std::string(name) + "'");
}

void NoiseSpec::validate() const {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw std::invalid_argument("NoiseSpec: fraction must lie in [0, 1]");
  if (!(relative_amplitude >= 0.0)) throw std::invalid_argument("NoiseSpec: relative_amplitude must be >= 0");
  if (!(sigma >= 0.0)) throw std::invalid_argument("NoiseSpec: sigma must be >= 0");
  if (!(amplitude >= 0.0)) throw std::invalid_argument("NoiseSpec: amplitude must be >= 0");
}

PerturbedData perturb(const GridFunction& y, const NoiseSpec& spec, const std::vector<double>& norms) {
  spec.validate();
  if (!y.all_finite()) throw std::invalid_argument("perturb: non-finite data");
  std::mt19937_64 rng(spec.seed);
  GridFunction y_delta = y;

  switch (spec.kind) {
    case NoiseKind::Impulsive: {
      const auto count = static_cast<Index>(std::llround(spec.fraction * static_cast<double>(y.size())));
      const double jump = spec.relative_amplitude * (y.size() > 0 ? y.values().cwiseAbs().maxCoeff() : 0.0);
      std::vector<Index> nodes(static_cast<std::size_t>(y.size()));
      std::iota(nodes.begin(), nodes.end(), Index{0});
      std::shuffle(nodes.begin(), nodes.end(), rng);
      std::bernoulli_distribution coin(0.5);
      for (Index i = 0; i < count; ++i) y_delta[nodes[static_cast<std::size_t>(i)]] += coin(rng) ? jump : -jump;
      break;
    }
    case NoiseKind::Gaussian: {
      std::normal_distribution<double> dist(0.0, 1.0);
      for (Index i = 0; i < y.size(); ++i) y_delta[i] += spec.sigma * dist(rng);
      break;
    }
    case NoiseKind::Uniform: {
      std::uniform_real_distribution<double> dist(-1.0, 1.0);
      for (Index i = 0; i < y.size(); ++i) y_delta[i] += spec.amplitude * dist(rng);
      break;
    }
  }

  PerturbedData out{std::move(y_delta), {}};
  for (double r : norms) out.delta_by_norm[r] = measure_delta(y, out.y_delta, r);
  return out;
}

double measure_delta(const GridFunction& y, const GridFunction& y_delta, double r) {
  return lp_norm(y - y_delta, r);
}

GridFunction rescale_noise(const GridFunction& y, const GridFunction& y_delta, double r, double delta) {
  const GridFunction noise = y_delta - y;
  const double size = lp_norm(noise, r);
  if (delta == 0.0) return y;
  if (!(size > 0.0)) throw std::invalid_argument("rescale_noise: zero noise cannot be rescaled");
  return y + (delta / size) * noise;
}

}  // namespace irgnh
