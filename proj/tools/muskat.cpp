#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "muskat/cli_io.hpp"
#include "muskat/parallel.hpp"

using namespace muskat;

namespace {

RunConfig config_from(const std::string& path) { return path.empty() ? parse_config("") : load_config(path); }

// Precedence: config file < MUSKAT_OUT_DIR < --out.
void apply_overrides(RunConfig& config, const std::string& out, int threads) {
  if (const char* env = std::getenv("MUSKAT_OUT_DIR"); env && *env) config.output_dir = env;
  if (!out.empty()) config.output_dir = out;
  if (threads > 0) config.threads = threads;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Muskat contour-dynamics lab"};
  app.require_subcommand(1);

  std::string config_path, out_dir, group, json_path;
  int threads = 0, grid = 0;
  std::vector<int> sizes{512, 1024, 2048};
  std::vector<int> bench_threads;
  double epsilon = 0.0;

  auto* sim = app.add_subcommand("simulate", "run one configuration and write its outputs");
  sim->add_option("config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", out_dir, "output directory");
  sim->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  auto* suite = app.add_subcommand("suite", "run the acceptance battery");
  suite->add_option("--group", group, "run a single group");
  suite->add_option("--grid", grid, "force every grid to N points");
  suite->add_option("--json", json_path, "write a JSON report");
  suite->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  suite->add_flag_callback("--list-groups", [] {
    for (const auto& g : suite_groups()) std::cout << g << "\n";
    std::exit(kExitOk);
  }, "print the group names");

  auto* bench_cmd = app.add_subcommand("bench", "time the velocity oracle against the optimized kernel");
  bench_cmd->add_option("--sizes", sizes, "grid sizes")->delimiter(',');
  bench_cmd->add_option("--threads", bench_threads, "thread counts")->delimiter(',');
  bench_cmd->add_option("--epsilon", epsilon, "kernel exponent");

  auto* disp = app.add_subcommand("dispersion", "fit decay rates of small windowed sines");
  disp->add_option("config", config_path, "configuration file")->check(CLI::ExistingFile);
  disp->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      auto config = config_from(config_path);
      apply_overrides(config, out_dir, threads);
      const auto outcome = run(config);
      if (outcome.exit_code == kExitAbort) {
        std::cerr << outcome.abort_reason << " (partial output in " << config.output_dir << ")\n";
      } else {
        std::cout << "completed " << outcome.steps << " steps, " << outcome.snapshots << " snapshots in "
                  << config.output_dir << "\n";
      }
      return outcome.exit_code;
    }
    if (*suite) {
      if (threads > 0) set_thread_count(threads);
      SuiteOptions opts;
      if (!group.empty()) opts.group = group;
      opts.grid_override = grid;
      opts.on_result = [](const CriterionResult& r) { std::cout << format_criterion(r) << std::endl; };
      const auto results = run_suite(opts);
      if (!json_path.empty()) {
        std::ofstream(json_path) << suite_report_json(results) << "\n";
      }
      const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass(); });
      return ok ? kExitOk : kExitSuiteFailure;
    }
    if (*bench_cmd) {
      if (bench_threads.empty()) bench_threads = {1, std::max(2, max_thread_count())};
      std::printf("%8s %8s %14s %14s %12s\n", "N", "threads", "oracle_s", "optimized_s", "rel_diff");
      for (const auto& row : bench(sizes, bench_threads, epsilon)) {
        std::printf("%8d %8d %14.6f %14.6f %12.3e\n", row.points, row.threads, row.oracle_seconds,
                    row.optimized_seconds, row.max_relative_difference);
      }
      return kExitOk;
    }
    if (*disp) {
      auto config = config_from(config_path);
      apply_overrides(config, "", threads);
      set_thread_count(config.threads > 0 ? config.threads : max_thread_count());
      std::printf("%4s %14s %14s %10s\n", "k", "fitted", "predicted", "rel_err");
      for (const auto& row : dispersion_sweep(config)) {
        std::printf("%4d %14.8f %14.8f %10.3e\n", row.wavenumber, row.fitted_rate, row.predicted_rate,
                    std::abs(row.fitted_rate / row.predicted_rate - 1.0));
      }
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalAbort& e) {
    std::cerr << e.what() << "\n";
    return kExitAbort;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
