// Batch CLI for the full-duplex self-interference cancellation simulator.
// One subcommand per experiment; CSV output plus a .meta sidecar per file.

#include <CLI11.hpp>
#include <iostream>

#include "fdsic/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fdsim - auxiliary-receiver digital self-interference cancellation simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", scenario;
  std::uint64_t seed = 1;
  int trials = 500;
  int workers = 0;

  app.add_option("--config", config_path, "key/value config file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--trials", trials, "Monte Carlo trials per point");
  app.add_option("--workers", workers, "worker threads (0: all cores)");
  app.add_option("--scenario", scenario, "scenario name for residual_sweep");

  for (const auto& name : fdsic::known_experiments())
    app.add_subcommand(name, "run the " + name + " experiment");

  CLI11_PARSE(app, argc, argv);

  try {
    fdsic::RunOptions opts;
    if (!config_path.empty()) opts.config = fdsic::KeyValueConfig::parse_file(config_path);
    opts.seed = opts.config.has("seed")
                    ? static_cast<std::uint64_t>(opts.config.get_int("seed", 1))
                    : seed;
    opts.trials = static_cast<int>(opts.config.get_int("trials", trials));
    opts.workers = static_cast<int>(opts.config.get_int("workers", workers));
    opts.out_dir = opts.config.get_string("out_dir", out_dir);
    if (!scenario.empty() && !opts.config.has("scenario")) {
      auto cfg = fdsic::KeyValueConfig::parse(opts.config.canonical() +
                                              "scenario = " + scenario + "\n");
      opts.config = cfg;
    }

    std::string experiment = opts.config.get_string("experiment", "");
    for (const auto* sub : app.get_subcommands()) experiment = sub->get_name();
    if (experiment.empty()) throw fdsic::ConfigError("experiment: none selected");

    const auto files = fdsic::run_experiment(experiment, opts);
    for (const auto& f : files) std::cout << "wrote " << f << "\n";
    return 0;
  } catch (const fdsic::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
