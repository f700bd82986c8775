#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <thread>

#include "json.hpp"
#include "muskat/cli_io.hpp"
#include "muskat/numerics.hpp"
#include "muskat/parallel.hpp"
#include "muskat/singular_ops.hpp"

namespace muskat {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void check(CriterionResult& r, std::string label, double measured, double threshold, bool upper = true) {
  const bool pass = std::isfinite(measured) && (upper ? measured <= threshold : measured >= threshold);
  r.checks.push_back(SuiteCheck{std::move(label), measured, threshold, upper, pass});
}

std::string tag(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

class Context {
 public:
  explicit Context(int grid_override) : override_(grid_override) {}

  int points(int nominal) const { return override_ > 0 ? override_ : nominal; }

  const SimulationResult& run(const std::string& key, const std::function<SimulationResult()>& make) {
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, make()).first;
    return it->second;
  }

  const SimulationResult& dispersion(int k) {
    return run("dispersion-" + std::to_string(k), [&] {
      ScenarioSpec spec;
      spec.kind = ScenarioKind::windowed_sine;
      spec.left = spec.right = 0.0;
      spec.amplitude = 1e-5;
      spec.wavenumber = k;
      spec.points = points(2048);
      SimulationSetup setup;
      setup.control.t_end = 0.3;
      return simulate(make_profile(spec), setup);
    });
  }

  const SimulationResult& instability() {
    return run("instability", [&] {
      auto cfg = rt_unstable_config(2, 1e-5, 0.1);
      cfg.spec.points = points(2048);
      SimulationSetup setup;
      setup.physics = cfg.physics;
      setup.control.t_end = cfg.t_max;
      return simulate(make_profile(cfg.spec), setup);
    });
  }

  const SimulationResult& max_principle(Scheme scheme) {
    return run("max-principle-" + to_string(scheme), [&] {
      ScenarioSpec spec;
      spec.points = points(2048);
      SimulationSetup setup;
      setup.scheme = scheme;
      setup.regularization.kernel_exponent = 0.05;
      setup.control.t_end = 1.0;
      return simulate(make_profile(spec), setup);
    });
  }

  const SimulationResult& tilted(Scheme scheme) {
    return run("tilted-" + to_string(scheme), [&] {
      ScenarioSpec spec;
      spec.kind = ScenarioKind::tilted;
      spec.tilt = -0.25;
      spec.points = points(2048);
      SimulationSetup setup;
      setup.scheme = scheme;
      setup.regularization.kernel_exponent = 0.05;
      setup.control.t_end = 0.5;
      return simulate(make_profile(spec), setup);
    });
  }

 private:
  int override_;
  std::map<std::string, SimulationResult> cache_;
};

void require_complete(const SimulationResult& r, const std::string& what) {
  if (r.aborted()) throw Error(what + ": " + r.abort_reason);
}

const Scheme kMaxPrincipleSchemes[] = {Scheme::cde, Scheme::regularized};

// 1
void steady_state(Context& ctx, CriterionResult& r) {
  const Grid grid(40.0, ctx.points(2048));
  const std::vector<double> zeros(static_cast<std::size_t>(grid.size()), 0.0);
  const std::vector<double> level(static_cast<std::size_t>(grid.size()), 0.7);
  const InterfaceProfile flat(grid, level, FarField{0.7, 0.7, 0.0});
  const InterfaceProfile inclined(grid, zeros, FarField{0.0, 0.0, -0.5});
  check(r, "constant 0.7 |v|inf", max_abs(ops::pv_velocity(flat, PhysicsParams{}, 0.0)), 1e-12);
  check(r, "tilt -0.5 |v|inf", max_abs(ops::pv_velocity(inclined, PhysicsParams{}, 0.0)), 1e-12);
}

// 2
void dispersion(Context& ctx, CriterionResult& r) {
  for (int k = 1; k <= 3; ++k) {
    const auto& run = ctx.dispersion(k);
    require_complete(run, "dispersion run");
    const double rate = dispersion_fit(run.trajectory, k).rate;
    check(r, "k=" + std::to_string(k) + " relative rate error", std::abs(rate / (-M_PI * k) - 1.0), 0.02);
  }
}

// 3
void instability(Context& ctx, CriterionResult& r) {
  const auto& run = ctx.instability();
  require_complete(run, "unstable run");
  const double rate = dispersion_fit(run.trajectory, 2).rate;
  check(r, "k=2 relative growth error", std::abs(rate / (2.0 * M_PI) - 1.0), 0.05);
}

// 4
void symbols(Context& ctx, CriterionResult& r) {
  const Grid grid(40.0, ctx.points(2048));
  const double L = grid.half_width();
  for (double s : {0.75, 0.9}) {
    for (int k = 1; k <= 3; ++k) {
      std::vector<double> f(static_cast<std::size_t>(grid.size()));
      for (int i = 0; i < grid.size(); ++i) {
        const double x = grid.node(i);
        f[static_cast<std::size_t>(i)] = std::sin(k * x) * smooth_window(x, 0.5 * L, 0.8 * L);
      }
      const InterfaceProfile p(grid, f, FarField{});
      const auto spectral = ops::lambda_power(p, s, ops::Backend::spectral);
      const auto kernel = ops::lambda_power(p, s, ops::Backend::kernel);
      check(r, "s=" + tag("%g", s) + " k=" + std::to_string(k) + " kernel vs spectral",
            max_abs_diff(spectral, kernel) / max_abs(spectral), 1e-3);
    }
  }
  // Pure modes on a period-compatible box.
  const Grid box(8.0 * M_PI, 512);
  double lambda_err = 0.0, hilbert_err = 0.0;
  for (int k = 1; k <= 3; ++k) {
    std::vector<double> sn(static_cast<std::size_t>(box.size())), cs(sn.size());
    for (int i = 0; i < box.size(); ++i) {
      sn[static_cast<std::size_t>(i)] = std::sin(k * box.node(i));
      cs[static_cast<std::size_t>(i)] = std::cos(k * box.node(i));
    }
    const InterfaceProfile ps(box, sn, FarField{}), pc(box, cs, FarField{});
    const auto l1 = ops::lambda_power(ps, 1.0, ops::Backend::spectral);
    const auto hs = ops::hilbert_transform(ps);
    const auto hc = ops::hilbert_transform(pc);
    for (std::size_t i = 0; i < sn.size(); ++i) {
      lambda_err = std::max(lambda_err, std::abs(l1[i] - k * sn[i]));
      hilbert_err = std::max({hilbert_err, std::abs(hs[i] + cs[i]), std::abs(hc[i] - sn[i])});
    }
  }
  check(r, "pure-mode Lambda symbol |k|", lambda_err, 1e-10);
  check(r, "pure-mode Hilbert symbol -i sign k", hilbert_err, 1e-10);
}

// 5
void max_principle(Context& ctx, CriterionResult& r) {
  const double tol = 1e-6;
  for (Scheme scheme : kMaxPrincipleSchemes) {
    const auto& run = ctx.max_principle(scheme);
    require_complete(run, to_string(scheme) + " run");
    const auto v = monotonicity_guard(run.trajectory, tol);
    const double sup0 = sup_norm(run.trajectory.front().profile);
    const std::string s = to_string(scheme) + " ";
    check(r, s + "max slope", v.slope_max, tol);
    check(r, s + "sup norm", sup0 + v.sup_drift, 1.0 + tol);
    check(r, s + "min value", -1.0 - v.min_value_drop, -1.0 - tol, false);
    check(r, s + "lap number", v.lap_max, 0.0);
    check(r, s + "slope_min drop", v.slope_min_drop, tol);
  }
}

// 6
void tilted(Context& ctx, CriterionResult& r) {
  for (Scheme scheme : kMaxPrincipleSchemes) {
    const auto& run = ctx.tilted(scheme);
    require_complete(run, to_string(scheme) + " tilted run");
    const auto v = monotonicity_guard(run.trajectory, 1e-6);
    const double beta = run.trajectory.front().profile.far_field().tilt;
    check(r, to_string(scheme) + " full slope - tilt/2", v.full_slope_max - 0.5 * beta, 1e-6);
  }
}

// 7
void asymptotics(Context& ctx, CriterionResult& r) {
  std::vector<std::pair<std::string, const SimulationResult*>> runs;
  for (int k = 1; k <= 3; ++k) runs.emplace_back("dispersion k=" + std::to_string(k), &ctx.dispersion(k));
  runs.emplace_back("instability", &ctx.instability());
  for (Scheme scheme : kMaxPrincipleSchemes) {
    runs.emplace_back("tanh " + to_string(scheme), &ctx.max_principle(scheme));
    runs.emplace_back("tilted " + to_string(scheme), &ctx.tilted(scheme));
  }
  for (const auto& [label, run] : runs) {
    double dev = 0.0;
    for (const auto& e : run->trajectory.entries()) {
      if (e.diagnostics) dev = std::max({dev, e.diagnostics->ff_dev_left, e.diagnostics->ff_dev_right});
    }
    check(r, label + " far-field deviation", dev, 1e-6);
  }
}

SimulationResult refined_run(const ScenarioSpec& spec, double t_end) {
  const auto p = make_profile(spec);
  SimulationSetup setup;
  setup.control.t_end = t_end;
  setup.control.dt_max = 0.2 * p.grid().spacing();
  auto result = simulate(p, setup);
  require_complete(result, "refinement run");
  return result;
}

// 8
void energy(Context& ctx, CriterionResult& r) {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::bump;
  spec.left = spec.right = 0.0;
  spec.amplitude = 0.5;
  spec.width = 2.0;
  double rel[2];
  for (int level = 0; level < 2; ++level) {
    spec.points = ctx.points(1024) << level;
    const auto run = refined_run(spec, 0.5);
    const auto& last = *run.trajectory.back().diagnostics;
    if (!last.energy_residual) throw Error("energy residual not recorded");
    rel[level] = std::abs(*last.energy_residual) / l2_norm_squared(run.trajectory.front().profile);
  }
  check(r, "N=" + std::to_string(ctx.points(1024)) + " |residual|/|f0|^2", rel[0], 0.01);
  check(r, "refinement reduction", rel[0] / rel[1], 1.7, false);
}

// 9
void weak_form(Context& ctx, CriterionResult& r) {
  ScenarioSpec spec;
  const double T = 0.5;
  double res[2];
  for (int level = 0; level < 2; ++level) {
    spec.points = ctx.points(1024) << level;
    const auto run = refined_run(spec, T);
    res[level] = std::abs(weak_form_residual(run.trajectory, PhysicsParams{}, default_test_function(40.0, T)));
  }
  check(r, "refinement reduction", res[0] / res[1], 2.0, false);
}

// 10
void picard(Context& ctx, CriterionResult& r) {
  ScenarioSpec spec;
  spec.points = ctx.points(2048);
  const auto initial = make_profile(spec);
  const double nu = 0.1, T = 0.01;
  const int M = 16;
  const auto result = picard_local_solve(initial, PhysicsParams{}, nu, T, M);
  const auto& rep = result.report;
  int decaying = rep.distances.empty() ? 0 : 1;
  for (double q : rep.ratios) {
    if (!(q < 1.0)) break;
    ++decaying;
  }
  check(r, "geometrically decaying iterates", decaying, 5.0, false);
  double last3 = INFINITY;
  if (rep.ratios.size() >= 3) last3 = *std::max_element(rep.ratios.end() - 3, rep.ratios.end());
  check(r, "max of last three ratios", last3, 0.5);
  check(r, "converged", rep.converged ? 1.0 : 0.0, 1.0, false);

  RegularizationParams reg;
  reg.local_viscosity = nu;
  const auto system = RegularizedSystem::local(reg);
  const double dt = T / M;
  auto q = initial;
  for (int m = 0; m < M; ++m) q = step_imex(q, PhysicsParams{}, system, dt);
  const auto fin = result.trajectory.back().profile.samples();
  double diff = 0.0;
  for (int i = 0; i < q.size(); ++i) diff = std::max(diff, std::abs(fin[static_cast<std::size_t>(i)] - q.at(i)));
  check(r, "Picard vs IMEX", diff, 5.0 * (dt + 1.0 / M) * sup_norm(initial));
}

std::string velocity_csv(const InterfaceProfile& p, const std::vector<double>& v) {
  std::string out = "x,v\n";
  char buf[80];
  for (int i = 0; i < p.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.grid().node(i), v[static_cast<std::size_t>(i)]);
    out += buf;
  }
  return out;
}

// 11
void oracle(Context& ctx, CriterionResult& r) {
  const int saved = thread_count();
  const int many = std::max(2, static_cast<int>(std::thread::hardware_concurrency()));
  const PhysicsParams physics;
  std::map<int, double> oracle_time;
  const int sizes[] = {ctx.points(512), ctx.points(2048)};
  for (int n : sizes) {
    ScenarioSpec spec;
    spec.points = n;
    const auto p = make_profile(spec);
    double best = INFINITY;
    std::vector<double> ref;
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = clock_type::now();
      ref = ops::velocity_reference_oracle(p, physics, 0.0);
      best = std::min(best, seconds_since(t0));
    }
    oracle_time[n] = best;
    std::string csv_one;
    for (int threads : {1, many}) {
      set_thread_count(threads);
      const auto v = ops::pv_velocity(p, physics, 0.0);
      check(r, "N=" + std::to_string(n) + " threads=" + std::to_string(threads) + " relative difference",
            max_abs_diff(v, ref) / max_abs(ref), 1e-13);
      const auto csv = velocity_csv(p, v);
      if (threads == 1) {
        csv_one = csv;
      } else {
        check(r, "N=" + std::to_string(n) + " CSV bytes differing across threads", csv == csv_one ? 0.0 : 1.0, 0.0);
      }
    }
  }
  set_thread_count(saved);
  // Quadratic scaling of the oracle between N and 2N.
  ScenarioSpec spec;
  spec.points = ctx.points(1024);
  const auto half = make_profile(spec);
  double best = INFINITY;
  for (int rep = 0; rep < 3; ++rep) {
    const auto t0 = clock_type::now();
    (void)ops::velocity_reference_oracle(half, physics, 0.0);
    best = std::min(best, seconds_since(t0));
  }
  const double ratio = oracle_time[ctx.points(2048)] / best;
  if (ctx.points(2048) == 2 * ctx.points(1024)) {
    check(r, "oracle time ratio 2N/N (>= 2.8)", ratio, 2.8, false);
    check(r, "oracle time ratio 2N/N (<= 5.2)", ratio, 5.2);
  }
}

// 12
void tail(Context& ctx, CriterionResult& r) {
  ScenarioSpec spec;
  spec.points = ctx.points(1024);
  const auto p = make_profile(spec);
  const double L = p.grid().half_width();
  const double A = L;
  const PhysicsParams physics;
  const auto near = ops::pv_velocity(p, physics, 0.0, ops::TailSpec{A});
  const auto far = ops::pv_velocity(p, physics, 0.0, ops::TailSpec{2.0 * A});
  const auto brute = ops::velocity_brute_force(p, physics, 0.0, 2.0e4);
  const auto d1 = numerics::first_derivative(p.samples(), p.grid().spacing());
  double change = 0.0, bound = 0.0, err_near = 0.0, err_far = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    if (std::abs(p.grid().node(i)) > 0.5 * L) continue;
    const auto k = static_cast<std::size_t>(i);
    change = std::max(change, std::abs(far[k] - near[k]));
    bound = std::max(bound, std::abs(ops::tail_correction(p.at(i), d1[k], p.far_field(), A)));
    err_near = std::max(err_near, std::abs(near[k] - brute[k]));
    err_far = std::max(err_far, std::abs(far[k] - brute[k]));
  }
  check(r, "change / tail size at A", bound > 0.0 ? change / bound : change, 2.0);
  check(r, "A vs brute force", err_near, 1e-6);
  check(r, "2A vs brute force", err_far, 1e-6);
}

struct Criterion {
  int id;
  const char* group;
  const char* name;
  void (*fn)(Context&, CriterionResult&);
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> table = {
      {1, "steady-state", "constant and tilted-line states are stationary", steady_state},
      {2, "dispersion", "small windowed sines decay at rate -pi k", dispersion},
      {3, "instability", "unstable stratification grows at rate +pi k", instability},
      {4, "symbols", "Lambda^s and Hilbert backends", symbols},
      {5, "max-principle", "tanh step keeps its monotone bounds", max_principle},
      {6, "tilted", "tilted step keeps full slope below tilt/2", tilted},
      {7, "asymptotics", "far-field values held at +-0.9L", asymptotics},
      {8, "energy", "L2 energy identity", energy},
      {9, "weak-form", "weak formulation residual converges", weak_form},
      {10, "picard", "local Picard iteration contracts", picard},
      {11, "oracle", "optimized velocity equals the reference oracle", oracle},
      {12, "tail", "far-field tail radius", tail},
  };
  return table;
}

}  // namespace

bool CriterionResult::pass() const {
  if (!error.empty() || checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.pass; });
}

const SuiteCheck* CriterionResult::worst() const {
  // Failures first, then the smallest relative headroom to the threshold.
  auto headroom = [](const SuiteCheck& c) {
    if (!std::isfinite(c.measured)) return -HUGE_VAL;
    const double gap = c.upper_bound ? c.threshold - c.measured : c.measured - c.threshold;
    return gap / std::max(std::abs(c.threshold), 1e-300);
  };
  const SuiteCheck* out = nullptr;
  for (const auto& c : checks) {
    if (!out || (c.pass != out->pass ? !c.pass : headroom(c) < headroom(*out))) out = &c;
  }
  return out;
}

const std::vector<std::string>& suite_groups() {
  static const std::vector<std::string> groups = [] {
    std::vector<std::string> g;
    for (const auto& c : criteria()) g.push_back(c.group);
    return g;
  }();
  return groups;
}

std::vector<CriterionResult> run_suite(const SuiteOptions& options) {
  if (options.group) {
    const auto& g = suite_groups();
    if (std::find(g.begin(), g.end(), *options.group) == g.end()) throw Error("unknown suite group '" + *options.group + "'");
  }
  Context ctx(options.grid_override);
  std::vector<CriterionResult> results;
  for (const auto& c : criteria()) {
    if (options.group && *options.group != c.group) continue;
    CriterionResult r;
    r.id = c.id;
    r.group = c.group;
    r.name = c.name;
    const auto t0 = clock_type::now();
    try {
      c.fn(ctx, r);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    r.seconds = seconds_since(t0);
    if (options.on_result) options.on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_criterion(const CriterionResult& r) {
  char head[160];
  std::snprintf(head, sizeof head, "%s  %02d %-13s %s", r.pass() ? "PASS" : "FAIL", r.id, r.group.c_str(),
                r.name.c_str());
  std::string out = head;
  if (!r.error.empty()) {
    out += "  error: " + r.error;
  } else if (const auto* w = r.worst()) {
    char tail[256];
    std::snprintf(tail, sizeof tail, "  [%s: %.3e %s %.3e]", w->label.c_str(), w->measured,
                  w->upper_bound ? "<=" : ">=", w->threshold);
    out += tail;
  }
  char secs[32];
  std::snprintf(secs, sizeof secs, "  (%.1fs)", r.seconds);
  return out + secs;
}

std::string suite_report_json(const std::vector<CriterionResult>& results) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["group"] = r.group;
    j["name"] = r.name;
    j["pass"] = r.pass();
    j["seconds"] = r.seconds;
    if (!r.error.empty()) j["error"] = r.error;
    auto checks = nlohmann::ordered_json::array();
    for (const auto& c : r.checks) {
      checks.push_back({{"label", c.label},
                        {"measured", std::isfinite(c.measured) ? nlohmann::ordered_json(c.measured) : nullptr},
                        {"threshold", c.threshold},
                        {"bound", c.upper_bound ? "upper" : "lower"},
                        {"pass", c.pass}});
    }
    j["checks"] = checks;
    arr.push_back(j);
  }
  return arr.dump(2);
}

}  // namespace muskat
