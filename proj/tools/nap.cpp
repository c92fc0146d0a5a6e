#include <CLI11.hpp>
#include <iostream>

#include "nap/cli.hpp"
#include "nap/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Nonadiabatic passage synthesis and protocol simulation"};
  app.set_version_flag("--version", nap::cli::kVersion);
  app.require_subcommand(1);

  nap::cli::CommonOptions common;
  std::string out_dir;
  std::size_t grid = 0;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_dir, "Output directory");
    cmd->add_option("--grid", grid, "Grid steps per protocol step")->check(CLI::PositiveNumber);
    cmd->add_option("--jobs", common.jobs, "Worker threads (0 = available parallelism)");
  };

  std::string config;
  auto* run = app.add_subcommand("run", "Run the protocol described by a configuration file");
  run->add_option("config", config, "Configuration file")->required();
  add_common(run);

  std::string parameter;
  std::string values;
  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter of a configuration");
  sweep->add_option("config", config, "Configuration file")->required();
  sweep->add_option("--param", parameter, "kappa_T, kappa_over_omega, omega_T or grid")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  add_common(sweep);

  nap::VerifyOptions verify;
  std::size_t max_m = 3;
  std::size_t max_n = 4;
  std::string sizes;
  auto* ver = app.add_subcommand("verify", "Run the randomized synthesis checks");
  ver->add_option("--seed", verify.seed, "Random seed");
  ver->add_option("--max-m", max_m, "Largest assistant dimension");
  ver->add_option("--max-n", max_n, "Largest working dimension");
  auto* sizes_opt = ver->add_option("--sizes", sizes, "Explicit MxN list, e.g. 1x2,2x3 (overrides --max-m/--max-n)");
  ver->add_option("--perturb-detuning", verify.detuning_offset, "Add a constant to the synthesized detuning");
  ver->add_option("--out", out_dir, "Directory for verify.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nap::cli::kUsageError;
  }
  if (!out_dir.empty()) {
    common.out = out_dir;
  }
  if (grid > 0) {
    common.grid = grid;
  }

  if (*run) {
    return nap::cli::cmd_run(config, common, std::cout, std::cerr);
  }
  if (*sweep) {
    try {
      return nap::cli::cmd_sweep(config, parameter, nap::cli::parse_values(values), common, std::cout, std::cerr);
    } catch (const nap::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return nap::cli::kUsageError;
    }
  }
  try {
    verify.sizes = sizes_opt->count() > 0 ? nap::cli::parse_sizes(sizes) : nap::size_range(max_m, max_n);
  } catch (const nap::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return nap::cli::kUsageError;
  }
  return nap::cli::cmd_verify(verify, common.out, std::cout, std::cerr);
}
