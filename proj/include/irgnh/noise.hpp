#pragma once

#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

#include "irgnh/grid_function.hpp"

namespace irgnh {

enum class NoiseKind { Impulsive, Gaussian, Uniform };

std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view name);

/// Impulsive: round(fraction * size) distinct nodes get +-relative_amplitude * max|y|,
/// signs by fair coin. Gaussian: iid N(0, sigma^2). Uniform: iid U(-amplitude, amplitude).
struct NoiseSpec {
  NoiseKind kind = NoiseKind::Impulsive;
  double fraction = 0.05;
  double relative_amplitude = 0.1;
  double sigma = 0.0;
  double amplitude = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PerturbedData {
  GridFunction y_delta;
  std::map<double, double> delta_by_norm;  ///< r -> ||y - y_delta||_r
};

PerturbedData perturb(const GridFunction& y, const NoiseSpec& spec,
                      const std::vector<double>& norms = {1.0, 1.1, 2.0});

/// ||y - y_delta||_r.
double measure_delta(const GridFunction& y, const GridFunction& y_delta, double r);

/// y + delta * (y_delta - y) / ||y_delta - y||_r, so the result is exactly at
/// distance delta (up to rounding). Throws if y_delta == y and delta > 0.
GridFunction rescale_noise(const GridFunction& y, const GridFunction& y_delta, double r, double delta);

}  // namespace irgnh
