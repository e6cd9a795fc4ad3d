#include <CLI11.hpp>
#include <iostream>

#include "leakycav/cli/runner.hpp"
#include "leakycav/errors.hpp"

namespace {

using namespace leakycav;

struct Common {
  std::string config;
  std::string out;
  std::string format;
  int jobs = 1;
  long long seed = 0;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "scenario file (JSON)")->required();
  sub->add_option("--out", c.out, "output directory (overrides $LEAKYCAV_OUT_DIR and the config)");
  sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--seed", c.seed, "reserved; every method is deterministic");
}

cli::RunOptions options(const Common& c) {
  cli::RunOptions o;
  if (!c.out.empty()) o.out_dir = c.out;
  if (c.format == "csv") o.format = cli::Format::Csv;
  if (c.format == "json") o.format = cli::Format::Json;
  o.jobs = c.jobs;
  return o;
}

int report(const cli::RunResult& r) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& f : r.files) std::cout << f << "\n";
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle creation in a vibrating leaky cavity"};
  app.require_subcommand(1);
  Common run_c, sweep_c, thr_c, modes_c, check_c;
  auto* run = app.add_subcommand("run", "evaluate every selected method over the time grid");
  auto* sweep = app.add_subcommand("sweep", "evaluate the methods over a parameter grid");
  auto* threshold = app.add_subcommand("threshold", "tabulate the detuning threshold against Delta");
  auto* modes = app.add_subcommand("modes", "dump the mode spectrum of a geometry");
  auto* check = app.add_subcommand("check", "validate a scenario file");
  add_common(run, run_c);
  add_common(sweep, sweep_c);
  add_common(threshold, thr_c);
  add_common(modes, modes_c);
  check->add_option("--config", check_c.config, "scenario file (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return report(cli::run_scenario(cli::load_scenario(run_c.config), options(run_c)));
    if (*sweep) return report(cli::run_sweep(cli::load_scenario(sweep_c.config), options(sweep_c)));
    if (*threshold) return report(cli::run_threshold(cli::load_scenario(thr_c.config), options(thr_c)));
    if (*modes) return report(cli::run_modes(cli::load_scenario(modes_c.config), options(modes_c)));
    if (*check) {
      for (const auto& w : cli::check_scenario(cli::load_scenario(check_c.config)))
        std::cerr << "warning: " << w << "\n";
      std::cout << "ok\n";
      return 0;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
