// roughns: reproducible experiment runner.
// Exit codes: 0 all assertions pass, 1 numerical assertion failed,
// 2 configuration or IO error.

#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "roughns/config.hpp"
#include "roughns/errors.hpp"
#include "roughns/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"spectral Galerkin studies for rough transport noise"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double corrupt_zz = 0.0;

  const char* names[] = {"energy_check", "wong_zakai", "remainder_scan", "chen_audit"};
  for (const char* name : names) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
    sub->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
      seed_set = true;
    });
    sub->add_option("--corrupt-zz", corrupt_zz, "inject a fault of this size into ZZ");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string experiment = app.get_subcommands().front()->get_name();

  try {
    const roughns::Config cfg = roughns::Config::load(config_path);
    roughns::ExperimentConfig ec = roughns::ExperimentConfig::from_config(cfg, experiment);
    if (seed_set) ec.seed = seed;
    if (!out_dir.empty()) ec.out_dir = out_dir;
    ec.corrupt_zz = corrupt_zz;

    roughns::ExperimentOutcome outcome;
    if (experiment == "energy_check") outcome = roughns::run_energy_check(ec);
    else if (experiment == "wong_zakai") outcome = roughns::run_wong_zakai(ec);
    else if (experiment == "remainder_scan") outcome = roughns::run_remainder_scan(ec);
    else outcome = roughns::run_chen_audit(ec);

    std::cout << outcome.summary << "\n";
    for (const std::string& file : outcome.artifacts) std::cout << "  wrote " << file << "\n";
    return outcome.passed ? 0 : 1;
  } catch (const roughns::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const roughns::IoError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}
