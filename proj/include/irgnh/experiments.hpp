#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "irgnh/config.hpp"

namespace irgnh {

namespace exit_code {
inline constexpr int kSuccess = 0;
inline constexpr int kNumericalFailure = 1;
inline constexpr int kConfigError = 2;
inline constexpr int kDivergence = 3;
}  // namespace exit_code

/// Command-line overrides applied on top of the config file.
struct CommandOptions {
  std::filesystem::path config_path;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

/// Loads and validates the config, runs `command`, writes its artifacts and
/// a manifest.json into the output directory, and returns the exit code.
/// Progress and errors go to `log`.
int run_command(Command command, const CommandOptions& options, std::ostream& log);

// The individual commands on an already validated config. Each returns an
// exit code and leaves manifest.json behind, also on failure.
int cmd_forward(const ExperimentConfig& config, std::ostream& log);
int cmd_invert(const ExperimentConfig& config, std::ostream& log);
int cmd_rates(const ExperimentConfig& config, std::ostream& log);
int cmd_compare(const ExperimentConfig& config, std::ostream& log);
int cmd_lemmas(const ExperimentConfig& config, std::ostream& log);

/// Reads whitespace- or comma-separated node indices ('#' starts a comment).
std::vector<Index> read_mask_file(const std::filesystem::path& path);

std::string_view version_string();

}  // namespace irgnh
