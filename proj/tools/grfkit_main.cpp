// grfkit command-line driver: every experiment is configured by a JSON file
// and dispatched through a subcommand that must match its "experiment" field.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "grfkit/experiments.hpp"
#include "grfkit/io.hpp"

namespace {

struct Args {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool assert_verdicts = false;
};

void add_run_flags(CLI::App* cmd, Args& args) {
  cmd->add_option("--config", args.config, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "override the config seed");
  cmd->add_option("--threads", args.threads, "override the config thread count")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--assert", args.assert_verdicts,
                "exit 3 when the statistical verdict fails");
}

int run(const std::string& subcommand, const Args& args) {
  // The config names its experiment; a mismatched subcommand is a config error.
  try {
    const nlohmann::json config = grfkit::io::read_json_file(args.config);
    if (config.value("experiment", "") != subcommand) {
      std::cerr << "config error: experiment \"" << config.value("experiment", "")
                << "\" does not match subcommand \"" << subcommand << "\"\n";
      return grfkit::cli::kExitConfig;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return grfkit::cli::kExitConfig;
  }
  grfkit::cli::RunOptions options;
  options.seed_override = args.seed;
  options.threads_override = args.threads;
  options.assert_verdicts = args.assert_verdicts;
  return grfkit::cli::run_config_file(args.config, options);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grfkit: Hermite-spectral experiments for generalized random fields"};
  app.require_subcommand(1);

  Args args;
  const char* const runnable[] = {"transform", "sample", "charfun", "minlos", "levy"};
  const char* const blurbs[] = {
      "expand a function in the Hermite basis",
      "draw Gaussian field coefficients and check their moments",
      "estimate a characteristic functional against the exact Gaussian one",
      "check the Minlos-style small-ball tail bound on a sample",
      "run the convergence/tightness equivalence harness",
  };
  for (std::size_t i = 0; i < std::size(runnable); ++i)
    add_run_flags(app.add_subcommand(runnable[i], blurbs[i]), args);

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("--config", validate_path, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) {
    const grfkit::cli::Diagnostics d = grfkit::cli::validate_config_file(validate_path);
    if (d.ok()) {
      std::cout << "config ok\n";
      return grfkit::cli::kExitOk;
    }
    for (const auto& issue : d.issues) std::cerr << "config error: " << issue << "\n";
    return grfkit::cli::kExitConfig;
  }
  for (const char* name : runnable)
    if (app.get_subcommand(name)->parsed()) return run(name, args);
  return grfkit::cli::kExitConfig;  // unreachable given require_subcommand(1)
}
