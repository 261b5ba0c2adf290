// Experiment runner: `fpkit run|sweep --config <path> --out <dir>` and
// `fpkit verify --suite <name>`.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fpkit/experiment.hpp"
#include "fpkit/verify.hpp"

namespace {

std::uint64_t verify_seed() {
  const char* env = std::getenv(fpkit::experiment::kSeedEnv);
  if (!env || !*env) return fpkit::verify::kDefaultSeed;
  return std::stoull(env);
}

}  // namespace

int main(int argc, char** argv) {
  namespace ex = fpkit::experiment;
  CLI::App app{"Fractional-programming experiments and property suites"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run one experiment and write trace.csv, summary.json, baselines.csv");
  run->add_option("--config", config, "JSON experiment config")->required();
  run->add_option("--out", out_dir, "Output directory")->required();

  auto* sweep = app.add_subcommand("sweep", "Run every point of the config's sweep axis and write sweep.csv");
  sweep->add_option("--config", config, "JSON experiment config")->required();
  sweep->add_option("--out", out_dir, "Output directory")->required();

  std::string suite_name = "all";
  auto* verify = app.add_subcommand("verify", "Run the randomized property suites");
  verify->add_option("--suite", suite_name, "core | matrix | lagrangian | apps | all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ex::kConfigError;
  }

  if (run->parsed()) return ex::run_experiment(config, out_dir, std::cerr);
  if (sweep->parsed()) return ex::run_sweep(config, out_dir, std::cerr);

  const auto suite = fpkit::verify::parse_suite(suite_name);
  if (!suite) {
    std::cerr << "config error: unknown suite '" << suite_name
              << "' (expected core, matrix, lagrangian, apps or all)\n";
    return ex::kConfigError;
  }
  std::uint64_t seed = 0;
  try {
    seed = verify_seed();
  } catch (const std::exception&) {
    std::cerr << "config error: " << ex::kSeedEnv << " must be a nonnegative integer\n";
    return ex::kConfigError;
  }
  return fpkit::verify::run_verify(*suite, std::cout, seed);
}
