#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "muskat/cli_io.hpp"

using namespace muskat;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("muskat_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ConfigError config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected a ConfigError");
  return ConfigError("", 0, "");
}

}  // namespace

TEST_CASE("empty config gives defaults") {
  const auto c = parse_config("# nothing here\n\n");
  CHECK(c == RunConfig{});
  CHECK(c.scenario.points == 2048);
  CHECK(c.scenario.half_width == 40.0);
  CHECK(c.scheme == Scheme::cde);
}

TEST_CASE("config values and round trip") {
  const auto c = parse_config(
      "scenario = bump\n"
      "scenario.a = 0   # trailing comment\n"
      "scenario.b = 0\n"
      "scenario.amplitude = 0.30000000000000004\n"
      "grid.N = 512\n"
      "grid.L = 20\n"
      "scheme = regularized\n"
      "regularization.kernel_exponent = 0.1\n"
      "control.T = 0.25\n"
      "threads = 2\n"
      "output.dir = /tmp/somewhere\n");
  CHECK(c.scenario.kind == ScenarioKind::bump);
  CHECK(c.scenario.amplitude == 0.1 + 0.2);
  CHECK(c.scenario.points == 512);
  CHECK(c.scheme == Scheme::regularized);
  CHECK(c.regularization.kernel_exponent == 0.1);
  CHECK(c.control.t_end == 0.25);
  CHECK(c.threads == 2);
  CHECK(c.output_dir == "/tmp/somewhere");
  const auto text = serialize_config(c);
  CHECK(parse_config(text) == c);
  CHECK(serialize_config(parse_config(text)) == text);
}

TEST_CASE("config errors name the key and line") {
  auto e = config_error("grid.N = 256\nscenario.a = -1\n");
  CHECK(e.key() == "scenario.a");
  CHECK(e.line() == 2);
  CHECK(std::string(e.what()).find("a must exceed b") != std::string::npos);

  e = config_error("\n\nregularization.kernel_exponent = 0.5\n");
  CHECK(e.key() == "regularization.kernel_exponent");
  CHECK(e.line() == 3);
  CHECK(std::string(e.what()).find("kernel_exponent must lie in [0, 0.5)") != std::string::npos);

  e = config_error("grid.N = many\n");
  CHECK(e.key() == "grid.N");
  CHECK(e.line() == 1);

  e = config_error("control.T = 1\ncolour = blue\n");
  CHECK(e.key() == "colour");
  CHECK(e.line() == 2);

  e = config_error("grid.L = 10\ngrid.L = 20\n");
  CHECK(e.line() == 2);

  e = config_error("scheme = leapfrog\n");
  CHECK(e.key() == "scheme");

  e = config_error("control.sigma = 2\n");
  CHECK(e.key() == "control.sigma");

  e = config_error("just some words\n");
  CHECK(e.line() == 1);

  e = config_error("control.dt_max = nan\n");
  CHECK(e.key() == "control.dt_max");
}

TEST_CASE("profile CSV round trip") {
  const auto dir = scratch_dir("csv");
  ScenarioSpec spec;
  spec.points = 256;
  spec.half_width = 20.0;
  const auto p = make_profile(spec);
  const auto path = (dir / "p.csv").string();
  write_profile_csv(p, path);
  CHECK(slurp(path).rfind("x,f\n", 0) == 0);
  const auto q = load_profile_csv(path, p.far_field());
  CHECK(q.grid() == p.grid());
  for (int i = 0; i < p.size(); ++i) CHECK(q.at(i) == p.at(i));

  std::ofstream(dir / "bad.csv") << "x,y\n0,1\n";
  CHECK_THROWS_AS(load_profile_csv((dir / "bad.csv").string(), {}), Error);
  std::ofstream uneven(dir / "uneven.csv");
  uneven << "x,f\n";
  for (int i = 0; i < 32; ++i) uneven << -4.0 + 0.25 * i + (i == 7 ? 0.1 : 0.0) << ",0\n";
  uneven.close();
  CHECK_THROWS_AS(load_profile_csv((dir / "uneven.csv").string(), {}), Error);
}

TEST_CASE("diagnostics JSON") {
  DiagnosticsRecord r;
  r.t = 0.5;
  r.lap_number = 2;
  auto j = nlohmann::json::parse(diagnostics_json(r));
  for (const char* key : {"t", "M", "m", "slope_max", "slope_min", "lap", "l2_dxf", "l2_dx3f", "holder_d2f",
                          "energy_residual", "ff_dev_left", "ff_dev_right"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["energy_residual"].is_null());
  CHECK(j["lap"] == 2);
  r.energy_residual = 1.25e-7;
  j = nlohmann::json::parse(diagnostics_json(r));
  CHECK(j["energy_residual"].get<double>() == 1.25e-7);
}

TEST_CASE("run writes its outputs") {
  const auto dir = scratch_dir("run");
  auto c = parse_config("grid.N = 128\ngrid.L = 20\ncontrol.T = 0.1\ncontrol.snapshot_stride = 2\n");
  c.output_dir = dir.string();
  c.threads = 1;
  const auto out = run(c);
  CHECK(out.exit_code == kExitOk);
  CHECK(out.abort_reason.empty());
  CHECK(fs::exists(dir / "snapshots" / "00000.csv"));
  CHECK(fs::exists(dir / "manifest.txt"));
  CHECK(parse_config(slurp(dir / "config.effective")) == c);
  std::istringstream lines(slurp(dir / "diagnostics.ndjson"));
  std::string line;
  std::size_t count = 0;
  double last_t = -1.0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j["t"].get<double>() > last_t);
    last_t = j["t"].get<double>();
    ++count;
  }
  CHECK(count == out.snapshots);
  CHECK(last_t == doctest::Approx(0.1));

  // A profile file takes over from the analytic scenario.
  auto from_file = c;
  from_file.scenario_file = (dir / "snapshots" / "00000.csv").string();
  CHECK(initial_profile(from_file).at(40) == initial_profile(c).at(40));
}

TEST_CASE("aborted runs report exit code 3") {
  const auto dir = scratch_dir("abort");
  auto c = parse_config(
      "scenario = windowed_sine\nscenario.a = 0\nscenario.b = 0\nscenario.amplitude = 1e-3\n"
      "scenario.wavenumber = 8\nphysics.density_coefficient = -1\ngrid.N = 512\ncontrol.T = 1\n");
  c.output_dir = dir.string();
  const auto out = run(c);
  CHECK(out.exit_code == kExitAbort);
  CHECK(out.abort_reason.rfind("aborted: ", 0) == 0);
  CHECK(slurp(dir / "manifest.txt").find("aborted: ") != std::string::npos);
}

TEST_CASE("suite plumbing") {
  CHECK(suite_groups().size() == 12);
  SuiteOptions opts;
  opts.group = "steady-state";
  opts.grid_override = 256;
  int seen = 0;
  opts.on_result = [&](const CriterionResult&) { ++seen; };
  const auto results = run_suite(opts);
  REQUIRE(results.size() == 1);
  CHECK(seen == 1);
  CHECK(results[0].pass());
  CHECK(format_criterion(results[0]).rfind("PASS", 0) == 0);
  const auto j = nlohmann::json::parse(suite_report_json(results));
  CHECK(j[0]["id"] == 1);
  opts.group = "nonsense";
  CHECK_THROWS_AS(run_suite(opts), Error);

  CriterionResult r;
  r.checks.push_back({"a", 0.5, 1.0, true, true});
  r.checks.push_back({"b", 3.0, 2.0, true, false});
  CHECK_FALSE(r.pass());
  CHECK(r.worst()->label == "b");
}

TEST_CASE("bench compares against the oracle") {
  const auto rows = bench({128, 256}, {1, 2});
  REQUIRE(rows.size() == 4);
  for (const auto& row : rows) CHECK(row.max_relative_difference <= 1e-13);
}
