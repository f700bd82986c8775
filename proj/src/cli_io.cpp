#include "muskat/cli_io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "muskat/parallel.hpp"
#include "muskat/singular_ops.hpp"

namespace muskat {

namespace {

constexpr const char* kVersion = "1.0.0";

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw std::invalid_argument("expected a finite number, got '" + v + "'");
  }
  return out;
}

long long to_integer(const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw std::invalid_argument("expected an integer, got '" + v + "'");
  return out;
}

int to_int(const std::string& v) {
  const long long x = to_integer(v);
  if (x < -2147483647LL || x > 2147483647LL) throw std::invalid_argument("integer out of range: '" + v + "'");
  return static_cast<int>(x);
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};


template <class Ref>
Field real_field(std::string key, Ref ref) {
  return Field{key, [ref](RunConfig& c, const std::string& v) { ref(c) = to_double(v); },
               [ref](const RunConfig& c) { return fmt_double(ref(const_cast<RunConfig&>(c))); }};
}

template <class Ref>
Field int_field(std::string key, Ref ref) {
  return Field{key, [ref](RunConfig& c, const std::string& v) { ref(c) = to_int(v); },
               [ref](const RunConfig& c) { return std::to_string(ref(const_cast<RunConfig&>(c))); }};
}

template <class Ref>
Field string_field(std::string key, Ref ref) {
  return Field{key, [ref](RunConfig& c, const std::string& v) { ref(c) = v; },
               [ref](const RunConfig& c) { return ref(const_cast<RunConfig&>(c)); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"scenario", [](RunConfig& c, const std::string& v) { c.scenario.kind = scenario_kind_from_string(v); },
            [](const RunConfig& c) { return to_string(c.scenario.kind); }},
      string_field("scenario.file", [](RunConfig& c) -> std::string& { return c.scenario_file; }),
      real_field("scenario.a", [](RunConfig& c) -> double& { return c.scenario.left; }),
      real_field("scenario.b", [](RunConfig& c) -> double& { return c.scenario.right; }),
      real_field("scenario.steepness", [](RunConfig& c) -> double& { return c.scenario.steepness; }),
      real_field("scenario.center", [](RunConfig& c) -> double& { return c.scenario.center; }),
      real_field("scenario.amplitude", [](RunConfig& c) -> double& { return c.scenario.amplitude; }),
      real_field("scenario.width", [](RunConfig& c) -> double& { return c.scenario.width; }),
      int_field("scenario.wavenumber", [](RunConfig& c) -> int& { return c.scenario.wavenumber; }),
      real_field("scenario.tilt", [](RunConfig& c) -> double& { return c.scenario.tilt; }),
      real_field("scenario.mollifier_width", [](RunConfig& c) -> double& { return c.scenario.mollifier_width; }),
      int_field("grid.N", [](RunConfig& c) -> int& { return c.scenario.points; }),
      real_field("grid.L", [](RunConfig& c) -> double& { return c.scenario.half_width; }),
      real_field("physics.density_coefficient", [](RunConfig& c) -> double& { return c.physics.density_coefficient; }),
      Field{"scheme", [](RunConfig& c, const std::string& v) { c.scheme = scheme_from_string(v); },
            [](const RunConfig& c) { return to_string(c.scheme); }},
      real_field("regularization.kernel_exponent",
                 [](RunConfig& c) -> double& { return c.regularization.kernel_exponent; }),
      real_field("regularization.local_viscosity",
                 [](RunConfig& c) -> double& { return c.regularization.local_viscosity; }),
      real_field("regularization.dissipation_constant",
                 [](RunConfig& c) -> double& { return c.regularization.dissipation_constant; }),
      real_field("control.sigma", [](RunConfig& c) -> double& { return c.control.sigma; }),
      real_field("control.dt_max", [](RunConfig& c) -> double& { return c.control.dt_max; }),
      real_field("control.T", [](RunConfig& c) -> double& { return c.control.t_end; }),
      int_field("control.snapshot_stride", [](RunConfig& c) -> int& { return c.control.snapshot_stride; }),
      real_field("diagnostics.gamma", [](RunConfig& c) -> double& { return c.diagnostics.gamma; }),
      real_field("diagnostics.probe_fraction", [](RunConfig& c) -> double& { return c.diagnostics.probe_fraction; }),
      real_field("diagnostics.far_field_tol", [](RunConfig& c) -> double& { return c.far_field_tol; }),
      real_field("diagnostics.slope_tol", [](RunConfig& c) -> double& { return c.slope_tol; }),
      string_field("output.dir", [](RunConfig& c) -> std::string& { return c.output_dir; }),
      Field{"seed",
            [](RunConfig& c, const std::string& v) {
              const long long s = to_integer(v);
              if (s < 0) throw std::invalid_argument("seed must be non-negative");
              c.seed = static_cast<std::uint64_t>(s);
            },
            [](const RunConfig& c) { return std::to_string(c.seed); }},
      int_field("threads", [](RunConfig& c) -> int& { return c.threads; }),
      int_field("suite.grid_override", [](RunConfig& c) -> int& { return c.grid_override; }),
      int_field("dispersion.max_wavenumber", [](RunConfig& c) -> int& { return c.dispersion_max_wavenumber; }),
  };
  return table;
}

// Attributes a validation message to the key whose leaf name opens it.
std::string key_for_message(const std::string& message, const std::string& fallback) {
  if (message.rfind("a must exceed b", 0) == 0) return "scenario.a";
  for (const auto& f : fields()) {
    const auto dot = f.key.rfind('.');
    const std::string leaf = dot == std::string::npos ? f.key : f.key.substr(dot + 1);
    if (message.rfind(leaf + " ", 0) == 0) return f.key;
  }
  return fallback;
}

void validate_config(const RunConfig& c, const std::map<std::string, int>& lines) {
  auto fail = [&](const std::string& fallback, const std::string& message) {
    const std::string key = key_for_message(message, fallback);
    const auto it = lines.find(key);
    throw ConfigError(key, it == lines.end() ? 0 : it->second, message);
  };
  auto guard = [&](const std::string& fallback, const auto& check) {
    try {
      check();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      fail(fallback, e.what());
    }
  };
  guard("scenario", [&] { c.scenario.validate(); });
  guard("regularization", [&] { c.regularization.validate(); });
  guard("control", [&] { c.control.validate(); });
  if (!(c.diagnostics.gamma > 0.0 && c.diagnostics.gamma < 0.5)) fail("diagnostics.gamma", "gamma must lie in (0, 0.5)");
  if (!(c.diagnostics.probe_fraction > 0.0 && c.diagnostics.probe_fraction < 1.0)) {
    fail("diagnostics.probe_fraction", "probe_fraction must lie in (0, 1)");
  }
  if (!(c.slope_tol >= 0.0)) fail("diagnostics.slope_tol", "slope_tol must be non-negative");
  if (c.physics.density_coefficient == 0.0) fail("physics.density_coefficient", "density_coefficient must be non-zero");
  if (c.scheme == Scheme::regularized && c.regularization.kernel_exponent == 0.0) {
    fail("regularization.kernel_exponent", "kernel_exponent must be positive for the regularized scheme");
  }
  if (c.scheme == Scheme::local && !(c.regularization.local_viscosity > 0.0)) {
    fail("regularization.local_viscosity", "local_viscosity must be positive for the local scheme");
  }
  if (c.threads < 0) fail("threads", "threads must be non-negative");
  if (c.grid_override != 0 && (c.grid_override < Grid::kMinPoints || c.grid_override % 2 != 0)) {
    fail("suite.grid_override", "grid_override must be 0 or an even integer >= 16");
  }
  if (c.dispersion_max_wavenumber < 1) fail("dispersion.max_wavenumber", "max_wavenumber must be at least 1");
  if (c.output_dir.empty()) fail("output.dir", "dir must not be empty");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace

ConfigError::ConfigError(const std::string& key, int line, const std::string& message)
    : Error("config line " + std::to_string(line) + ", key '" + key + "': " + message), key_(key), line_(line) {}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::map<std::string, int> lines;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line, line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.key == key; });
    if (it == table.end()) throw ConfigError(key, line_no, "unknown key");
    if (lines.count(key)) throw ConfigError(key, line_no, "duplicate key");
    if (value.empty() && key != "scenario.file") throw ConfigError(key, line_no, "missing value");
    try {
      it->set(config, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key, line_no, e.what());
    } catch (const Error& e) {
      throw ConfigError(key, line_no, e.what());
    }
    lines[key] = line_no;
  }
  validate_config(config, lines);
  return config;
}

RunConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const auto& f : fields()) out += f.key + " = " + f.get(config) + "\n";
  return out;
}

InterfaceProfile load_profile_csv(const std::string& path, const FarField& far_field) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || trim(line) != "x,f") throw Error("profile CSV must start with the header 'x,f'");
  std::vector<double> xs, fs;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error("malformed CSV row '" + line + "'");
    try {
      xs.push_back(to_double(trim(line.substr(0, comma))));
      fs.push_back(to_double(trim(line.substr(comma + 1))));
    } catch (const std::invalid_argument& e) {
      throw Error(std::string("malformed CSV row: ") + e.what());
    }
  }
  if (xs.size() < static_cast<std::size_t>(Grid::kMinPoints)) throw Error("profile CSV has too few rows");
  const Grid grid(-xs.front(), static_cast<int>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i] - grid.node(static_cast<int>(i))) > 1e-9 * grid.spacing() * static_cast<double>(xs.size())) {
      throw Error("profile CSV must sample the uniform grid x_i = -L + i h");
    }
  }
  return InterfaceProfile(grid, std::move(fs), far_field);
}

void write_profile_csv(const InterfaceProfile& profile, const std::string& path) {
  std::string text = "x,f\n";
  for (int i = 0; i < profile.size(); ++i) {
    text += fmt_double(profile.grid().node(i)) + "," + fmt_double(profile.at(i)) + "\n";
  }
  write_file(path, text);
}

std::string diagnostics_json(const DiagnosticsRecord& r) {
  nlohmann::ordered_json j;
  j["t"] = r.t;
  j["M"] = r.max_value;
  j["m"] = r.min_value;
  j["slope_max"] = r.slope_max;
  j["slope_min"] = r.slope_min;
  j["lap"] = r.lap_number;
  j["l2_dxf"] = r.l2_dxf;
  j["l2_dx3f"] = r.l2_dx3f;
  j["holder_d2f"] = r.holder_d2f;
  j["energy_residual"] = r.energy_residual ? nlohmann::ordered_json(*r.energy_residual) : nlohmann::ordered_json();
  j["ff_dev_left"] = r.ff_dev_left;
  j["ff_dev_right"] = r.ff_dev_right;
  return j.dump();
}

InterfaceProfile initial_profile(const RunConfig& config) {
  if (config.scenario_file.empty()) return make_profile(config.scenario);
  const FarField ff{config.scenario.left, config.scenario.right, config.scenario.tilt};
  auto p = load_profile_csv(config.scenario_file, ff);
  if (config.scenario.mollifier_width > 0.0) p = mollify(p, config.scenario.mollifier_width);
  return p;
}

RunOutcome run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  set_thread_count(config.threads > 0 ? config.threads : max_thread_count());
  const auto initial = initial_profile(config);
  ValidationTolerances tol;
  tol.far_field = config.far_field_tol;
  const auto check = validate_profile(initial, tol);
  if (!check.settled()) {
    throw ConfigError("grid.L", 0, "initial data do not settle to the far field (deviation " +
                                       fmt_double(check.boundary_deviation()) + ")");
  }
  SimulationSetup setup;
  setup.scheme = config.scheme;
  setup.physics = config.physics;
  setup.regularization = config.regularization;
  setup.control = config.control;
  setup.diagnostics = config.diagnostics;
  const auto result = simulate(initial, setup);

  namespace fs = std::filesystem;
  const fs::path dir(config.output_dir);
  fs::create_directories(dir / "snapshots");
  std::string ndjson;
  std::size_t index = 0;
  for (const auto& e : result.trajectory.entries()) {
    char name[32];
    std::snprintf(name, sizeof name, "%05zu.csv", index++);
    write_profile_csv(e.profile, (dir / "snapshots" / name).string());
    if (e.diagnostics) ndjson += diagnostics_json(*e.diagnostics) + "\n";
  }
  write_file(dir / "diagnostics.ndjson", ndjson);
  write_file(dir / "config.effective", serialize_config(config));
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::string manifest = "muskat " + std::string(kVersion) + "\n";
  manifest += "scheme = " + to_string(config.scheme) + "\n";
  manifest += "steps = " + std::to_string(result.steps) + "\n";
  manifest += "snapshots = " + std::to_string(result.trajectory.size()) + "\n";
  manifest += "final_time = " + fmt_double(result.trajectory.back().time) + "\n";
  manifest += "threads = " + std::to_string(thread_count()) + "\n";
  manifest += "wall_seconds = " + fmt_double(wall) + "\n";
  manifest += "status = " + std::string(result.aborted() ? result.abort_reason : "ok") + "\n";
  manifest += "\n[effective config]\n" + serialize_config(config);
  write_file(dir / "manifest.txt", manifest);

  RunOutcome outcome;
  outcome.exit_code = result.aborted() ? kExitAbort : kExitOk;
  outcome.abort_reason = result.abort_reason;
  outcome.steps = result.steps;
  outcome.snapshots = result.trajectory.size();
  return outcome;
}

std::vector<BenchRow> bench(const std::vector<int>& sizes, const std::vector<int>& thread_counts, double epsilon) {
  using clock = std::chrono::steady_clock;
  std::vector<BenchRow> rows;
  const int saved = thread_count();
  for (int n : sizes) {
    ScenarioSpec spec;
    spec.points = n;
    const auto profile = make_profile(spec);
    const PhysicsParams physics;
    auto t0 = clock::now();
    const auto ref = ops::velocity_reference_oracle(profile, physics, epsilon);
    const double oracle_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    double scale = 0.0;
    for (double v : ref) scale = std::max(scale, std::abs(v));
    for (int threads : thread_counts) {
      set_thread_count(threads);
      t0 = clock::now();
      const auto v = ops::pv_velocity(profile, physics, epsilon);
      const double opt_seconds = std::chrono::duration<double>(clock::now() - t0).count();
      double diff = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) diff = std::max(diff, std::abs(v[i] - ref[i]));
      const double rel = scale > 0.0 ? diff / scale : diff;
      if (!(rel <= 1e-13)) {
        set_thread_count(saved);
        throw Error("optimized velocity disagrees with the oracle at N=" + std::to_string(n) + " (" +
                    fmt_double(rel) + " relative)");
      }
      rows.push_back(BenchRow{n, threads, oracle_seconds, opt_seconds, rel});
    }
  }
  set_thread_count(saved);
  return rows;
}

std::vector<DispersionRow> dispersion_sweep(const RunConfig& config) {
  std::vector<DispersionRow> rows;
  for (int k = 1; k <= config.dispersion_max_wavenumber; ++k) {
    ScenarioSpec spec = config.scenario;
    spec.kind = ScenarioKind::windowed_sine;
    spec.left = spec.right = 0.0;
    spec.tilt = 0.0;
    spec.wavenumber = k;
    SimulationSetup setup;
    setup.scheme = Scheme::cde;
    setup.physics = config.physics;
    setup.control = config.control;
    setup.diagnostics = config.diagnostics;
    const auto result = simulate(make_profile(spec), setup);
    const auto fit = dispersion_fit(result.trajectory, k);
    rows.push_back(DispersionRow{k, fit.rate, -M_PI * config.physics.density_coefficient * k});
  }
  return rows;
}

}  // namespace muskat
