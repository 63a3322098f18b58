// frontlab r0|simulate|hstar|mustar|semiwave|sweep --config <file> [--out <dir>] [--workers N]
//
// Exit status: 0 success, 2 invalid input, 3 numerical failure.

#include <cstdio>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "frontlab/config.hpp"
#include "frontlab/error.hpp"
#include "frontlab/experiments.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frontlab: free-boundary SIS epidemic laboratory"};
  app.set_version_flag("--version", std::string(frontlab::version()));
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir;
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  bool quiet = false;

  for (const char* name : {"r0", "simulate", "hstar", "mustar", "semiwave", "sweep"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " task");
    sub->add_option("--config,-c", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out,-o", out_dir, "output directory (overrides output_dir)");
    sub->add_option("--workers,-j", workers, "worker threads for sweeps")->check(CLI::Range(1, 256));
    sub->add_flag("--quiet,-q", quiet, "do not print the summary");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  const auto* sub = app.get_subcommands().front();
  try {
    const auto task = frontlab::parse_task(sub->get_name());
    const auto config = frontlab::load_config(config_path, task);
    frontlab::RunOptions options;
    if (!out_dir.empty()) options.output_dir = out_dir;
    options.workers = workers;
    const auto report = frontlab::run(config, options);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    if (!quiet) {
      std::cout << "task " << frontlab::to_string(report.task) << '\n';
      for (const auto& [k, v] : report.labels) std::cout << "  " << k << " = " << v << '\n';
      for (const auto& [k, v] : report.values) std::printf("  %s = %.10g\n", k.c_str(), v);
      for (const auto& [k, v] : report.residuals) std::printf("  residual %s = %.3g\n", k.c_str(), v);
      std::printf("  wall_time_s = %.3f\n", report.wall_time_s);
    }
    return 0;
  } catch (const frontlab::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const frontlab::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}
