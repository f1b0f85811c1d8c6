// dkg-lab <experiment> --config path [--seed N] [--out dir] [--override-admissibility]

#include "dkg/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments for the one-dimensional Dirac-Klein-Gordon system"};
  std::string experiment;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool override_admissibility = false;

  app.add_option("experiment", experiment, "Experiment to run")
      ->required()
      ->check(CLI::IsMember(dkg::experiment_names()));
  app.add_option("--config", config_path, "Flat JSON configuration file")->required();
  app.add_option("--seed", seed, "Override the configured seed");
  app.add_option("--out", out, "Output directory (overrides the configured one)");
  app.add_flag("--override-admissibility", override_admissibility,
               "Run estimate probes at exponents outside their proven range");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dkg::kExitConfig;
  }

  dkg::ExperimentConfig cfg;
  try {
    cfg = dkg::load_config(config_path);
    const auto requested = dkg::parse_experiment(experiment);
    if (cfg.experiment && *cfg.experiment != requested)
      throw dkg::ConfigError("configuration is for '" + dkg::to_string(*cfg.experiment) + "', not '" + experiment + "'",
                             0);
    cfg.experiment = requested;
  } catch (const dkg::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return dkg::kExitConfig;
  }
  if (seed) cfg.seed = *seed;
  if (out) cfg.out = *out;
  if (override_admissibility) cfg.override_admissibility = true;

  try {
    const auto result = dkg::run(cfg);
    (result.exit_code == dkg::kExitOk ? std::cout : std::cerr) << result.message << '\n';
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
