// SPDX-License-Identifier: Apache-2.0
// mmfdr: run sweeps, figure presets and the optimizer from the command line.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "mmfdr/config.hpp"

namespace {

int emit(const mmfdr::ExperimentSpec& spec, const std::string& out) {
  const auto rows = mmfdr::run_experiment(spec);
  const std::string path = out.empty() ? spec.output : out;
  if (path.empty() || path == "-") {
    mmfdr::write_csv(std::cout, rows);
    return 0;
  }
  std::ofstream f(path);
  if (!f) throw mmfdr::ConfigError("cannot write '" + path + "'");
  mmfdr::write_csv(f, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Massive-MIMO full-duplex relaying simulator"};
  app.require_subcommand(1);

  std::string config, out, objective = "se", name;
  int trials = 0;
  std::uint64_t seed = 0;
  double target = 0.0;

  auto* run = app.add_subcommand("run", "evaluate a configured sweep");
  run->add_option("--config", config, "config file")->required();
  run->add_option("--trials", trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Monte Carlo seed");
  run->add_option("--out", out, "CSV path ('-' for stdout)");

  auto* pre = app.add_subcommand("preset", "run a figure preset at desk scale");
  pre->add_option("name", name, "fig1 .. fig7")->required();
  pre->add_option("--out", out, "CSV path ('-' for stdout)");

  auto* opt = app.add_subcommand("optimize", "joint DOF and power optimization");
  opt->add_option("--config", config, "config file")->required();
  opt->add_option("--objective", objective, "se or ee")->check(CLI::IsMember({"se", "ee"}));
  opt->add_option("--target-rate", target, "total SE target for ee (bit/s/Hz)");
  opt->add_option("--out", out, "CSV path ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      mmfdr::ExperimentSpec spec = mmfdr::parse_config(config);
      if (trials > 0) spec.trials = trials;
      if (run->count("--seed")) spec.seed = seed;
      return emit(spec, out);
    }
    if (*pre) {
      const mmfdr::Preset p = mmfdr::preset(name);
      std::cerr << name << ": " << p.deviation << "\n";
      return emit(p.spec, out);
    }
    mmfdr::ExperimentSpec spec = mmfdr::parse_config(config);
    spec.mode = objective == "se" ? mmfdr::Mode::kOptimizeSe : mmfdr::Mode::kOptimizeEe;
    if (opt->count("--target-rate")) spec.target_rate = target;
    spec.validate();
    return emit(spec, out);
  } catch (const mmfdr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const mmfdr::ConvergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << " (residual " << e.residual() << " after "
              << e.iterations() << " iterations)\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
