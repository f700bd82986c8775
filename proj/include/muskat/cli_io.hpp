#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "muskat/core.hpp"
#include "muskat/diagnostics.hpp"
#include "muskat/evolution.hpp"
#include "muskat/scenarios.hpp"

namespace muskat {

/// Parse or validation failure, tagged with the offending key and line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, int line, const std::string& message);
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

struct RunConfig {
  ScenarioSpec scenario;
  std::string scenario_file;  // CSV "x,f" overriding the analytic scenario
  Scheme scheme = Scheme::cde;
  PhysicsParams physics;
  RegularizationParams regularization;
  StepControl control;
  DiagnosticsOptions diagnostics;
  double far_field_tol = -1.0;  // negative: 1e-8 max(1, |a-b|)
  double slope_tol = 1e-6;
  std::string output_dir = "muskat_out";
  std::uint64_t seed = 0;  // reserved
  int threads = 0;         // 0: hardware concurrency
  int grid_override = 0;   // suite only; 0 keeps each criterion's grid
  int dispersion_max_wavenumber = 4;

  bool operator==(const RunConfig& other) const = default;
};

/// Flat "dotted.key = value" text; '#' starts a comment. Unknown keys, type
/// mismatches and constraint violations raise ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Every key with its effective value; doubles round-trip exactly.
std::string serialize_config(const RunConfig& config);

/// Reads a CSV with header "x,f" on a uniform grid.
InterfaceProfile load_profile_csv(const std::string& path, const FarField& far_field);
void write_profile_csv(const InterfaceProfile& profile, const std::string& path);

/// One NDJSON line for a diagnostics record.
std::string diagnostics_json(const DiagnosticsRecord& record);

InterfaceProfile initial_profile(const RunConfig& config);

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitAbort = 3, kExitSuiteFailure = 4 };

struct RunOutcome {
  int exit_code = kExitOk;
  std::string abort_reason;
  int steps = 0;
  std::size_t snapshots = 0;
};

/// Simulates and writes snapshots/NNNNN.csv, diagnostics.ndjson, manifest.txt
/// and config.effective under config.output_dir.
RunOutcome run(const RunConfig& config);

struct SuiteCheck {
  std::string label;
  double measured = 0.0;
  double threshold = 0.0;
  bool upper_bound = true;  // measured <= threshold, else measured >= threshold
  bool pass = false;
};

struct CriterionResult {
  int id = 0;
  std::string group;
  std::string name;
  std::vector<SuiteCheck> checks;
  double seconds = 0.0;
  std::string error;  // non-empty when the criterion threw

  bool pass() const;
  /// Check with the worst margin relative to its threshold.
  const SuiteCheck* worst() const;
};

struct SuiteOptions {
  std::optional<std::string> group;
  int grid_override = 0;
  /// Called after each criterion finishes.
  std::function<void(const CriterionResult&)> on_result;
};

const std::vector<std::string>& suite_groups();

/// Runs the acceptance battery (or one group of it).
std::vector<CriterionResult> run_suite(const SuiteOptions& options);

std::string format_criterion(const CriterionResult& result);
std::string suite_report_json(const std::vector<CriterionResult>& results);

struct BenchRow {
  int points = 0;
  int threads = 0;
  double oracle_seconds = 0.0;
  double optimized_seconds = 0.0;
  double max_relative_difference = 0.0;
};

/// Times the reference oracle against pv_velocity; throws if they disagree by
/// more than 1e-13 relative.
std::vector<BenchRow> bench(const std::vector<int>& sizes, const std::vector<int>& thread_counts, double epsilon = 0.0);

struct DispersionRow {
  int wavenumber = 0;
  double fitted_rate = 0.0;
  double predicted_rate = 0.0;
};

/// Windowed-sine runs for k = 1..max_wavenumber with the configured physics.
std::vector<DispersionRow> dispersion_sweep(const RunConfig& config);

}  // namespace muskat
