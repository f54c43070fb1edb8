#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "irgnh/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Two-stage regularized Newton-type inversion in L^p spaces"};
  app.set_version_flag("--version", std::string(irgnh::version_string()));
  app.require_subcommand(1);

  irgnh::CommandOptions opts;
  std::string out;
  std::uint64_t seed = 0;
  int workers = 1;

  const std::pair<irgnh::Command, const char*> commands[] = {
      {irgnh::Command::Forward, "solve the forward PDE and write synthetic data"},
      {irgnh::Command::Invert, "run one inversion"},
      {irgnh::Command::Rates, "noise-level sweep or exact-data order study"},
      {irgnh::Command::Compare, "misfit exponent comparison under impulsive noise"},
      {irgnh::Command::Lemmas, "numerical certificates for the recursion lemmas"},
  };
  for (const auto& [command, help] : commands) {
    CLI::App* sub = app.add_subcommand(std::string(irgnh::to_string(command)), help);
    sub->add_option("--config", opts.config_path, "experiment config file")->required();
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "noise seed (overrides the config)");
    sub->add_option("--workers", workers, "worker threads for sweeps")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : irgnh::exit_code::kConfigError;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (chosen->count("--out")) opts.out = out;
  if (chosen->count("--seed")) opts.seed = seed;
  if (chosen->count("--workers")) opts.workers = workers;
  return irgnh::run_command(irgnh::parse_command(chosen->get_name()), opts, std::cerr);
}
