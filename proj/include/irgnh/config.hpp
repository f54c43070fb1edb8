#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "irgnh/iteration.hpp"
#include "irgnh/noise.hpp"

namespace irgnh {

/// Invalid or incomplete experiment configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { Forward, Invert, Rates, Compare, Lemmas };

std::string_view to_string(Command command);
Command parse_command(std::string_view name);

enum class ProblemKind { Elliptic, Diagonal, Scalar };

std::string_view to_string(ProblemKind kind);

struct ProblemSection {
  ProblemKind kind = ProblemKind::Elliptic;
  std::optional<int> n;
  double f_const = 4000.0;
  double g_const = 10.0;
  double c_bar = 5.0;
  double xi = 0.1;
  std::optional<std::filesystem::path> observation_mask_path;
  // diagonal benchmark
  double spectrum_decay = 6.0;
  double v_norm = 0.1;
  // scalar model
  double curvature = 1.0;
  double x_true = 0.2;
  double x_start = 0.5;
};

struct MethodSection {
  std::optional<Method> method;
  std::optional<double> p;
  std::optional<double> r;
  double alpha0 = 1.0;
  double q = 2.0;
  double s = 1.0;
  double tau = 1.5;
  double alpha_floor = 0.1;
  double beta_floor = 0.1;
  int max_iters = 25;
  SecondStageReference second_reference = SecondStageReference::InitialGuess;
  SolverOptions solver;
};

struct StudySection {
  std::vector<double> deltas{1e-2, 1e-3, 1e-4, 1e-5};
  int workers = 1;
};

struct LemmaSection {
  int samples = 1000;
  int k_max = 30;
};

struct OutputSection {
  std::filesystem::path directory = "out";
  std::set<std::string> formats{"csv", "json", "svg"};

  bool wants(const std::string& format) const { return formats.count(format) > 0; }
};

/// Sectioned key=value experiment description. Unknown sections or keys are
/// errors; values are range-checked by validate() before any computation.
struct ExperimentConfig {
  ProblemSection problem;
  MethodSection method;
  NoiseSpec noise;
  StudySection study;
  LemmaSection lemmas;
  OutputSection output;
  std::string sha256;  ///< hash of the source text

  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& path);

  /// Checks that everything `command` needs is present and consistent.
  void validate(Command command) const;

  ExponentConfig exponents() const;
  Schedule schedule() const;
  RunConfig run_config(const GridFunction& x0) const;
};

std::string sha256_hex(const std::string& bytes);

}  // namespace irgnh
