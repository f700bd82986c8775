#include "muskat/scenarios.hpp"

#include <cmath>
#include <functional>

namespace muskat {

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::constant: return "constant";
    case ScenarioKind::tanh_step: return "tanh_step";
    case ScenarioKind::smoothed_ramp: return "smoothed_ramp";
    case ScenarioKind::bump: return "bump";
    case ScenarioKind::windowed_sine: return "windowed_sine";
    case ScenarioKind::tilted: return "tilted";
  }
  return "unknown";
}

ScenarioKind scenario_kind_from_string(const std::string& name) {
  for (auto k : {ScenarioKind::constant, ScenarioKind::tanh_step, ScenarioKind::smoothed_ramp, ScenarioKind::bump,
                 ScenarioKind::windowed_sine, ScenarioKind::tilted}) {
    if (to_string(k) == name) return k;
  }
  throw Error("unknown scenario kind '" + name + "'");
}

void ScenarioSpec::validate() const {
  if (!(half_width > 0.0)) throw Error("grid half-width must be positive");
  if (points < Grid::kMinPoints || points % 2 != 0) throw Error("grid point count must be an even integer >= 16");
  if (!(mollifier_width >= 0.0)) throw Error("mollifier width must be non-negative");
  switch (kind) {
    case ScenarioKind::constant:
      if (left != right) throw Error("constant data need a = b");
      break;
    case ScenarioKind::tanh_step:
    case ScenarioKind::smoothed_ramp:
    case ScenarioKind::tilted:
      if (!(left > right)) throw Error("a must exceed b");
      if (kind != ScenarioKind::smoothed_ramp && !(steepness > 0.0)) throw Error("steepness must be positive");
      if (kind == ScenarioKind::smoothed_ramp && !(width > 0.0)) throw Error("ramp width must be positive");
      if (kind == ScenarioKind::tilted && !(tilt < 0.0)) throw Error("tilt must be negative for decreasing data");
      break;
    case ScenarioKind::bump:
      if (!(amplitude > 0.0)) throw Error("amplitude must be positive");
      if (!(width > 0.0)) throw Error("bump width must be positive");
      break;
    case ScenarioKind::windowed_sine:
      if (!(amplitude > 0.0)) throw Error("amplitude must be positive");
      if (wavenumber < 1) throw Error("wavenumber must be a positive integer");
      break;
  }
}

double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double e0 = std::exp(-1.0 / t);
  const double e1 = std::exp(-1.0 / (1.0 - t));
  return e0 / (e0 + e1);
}

double smooth_window(double x, double plateau, double support) {
  return 1.0 - smoothstep((std::abs(x) - plateau) / (support - plateau));
}

InterfaceProfile make_profile(const ScenarioSpec& spec) {
  spec.validate();
  const Grid grid(spec.half_width, spec.points);
  const double L = spec.half_width;
  const double a = spec.left, b = spec.right;
  FarField ff{a, b, 0.0};
  std::function<double(double)> shape;
  switch (spec.kind) {
    case ScenarioKind::constant:
      shape = [a](double) { return a; };
      break;
    case ScenarioKind::tilted:
      ff.tilt = spec.tilt;
      [[fallthrough]];
    case ScenarioKind::tanh_step:
      shape = [&](double x) { return 0.5 * (a + b) + 0.5 * (a - b) * std::tanh(-spec.steepness * (x - spec.center)); };
      break;
    case ScenarioKind::smoothed_ramp:
      shape = [&](double x) {
        return a + (b - a) * smoothstep((x - spec.center + spec.width) / (2.0 * spec.width));
      };
      break;
    case ScenarioKind::bump:
      ff = FarField{};
      shape = [&](double x) {
        const double z = (x - spec.center) / spec.width;
        return spec.amplitude * std::exp(-z * z);
      };
      break;
    case ScenarioKind::windowed_sine:
      ff = FarField{};
      shape = [&](double x) {
        return spec.amplitude * std::sin(spec.wavenumber * x) * smooth_window(x, 0.5 * L, 0.8 * L);
      };
      break;
  }
  std::vector<double> f(static_cast<std::size_t>(grid.size()));
  for (int i = 0; i < grid.size(); ++i) f[static_cast<std::size_t>(i)] = shape(grid.node(i));
  InterfaceProfile profile(grid, std::move(f), ff);
  if (spec.mollifier_width > 0.0) profile = mollify(profile, spec.mollifier_width);
  if (!validate_profile(profile).settled()) {
    throw Error("initial data do not settle to the far field inside [-L, L); increase the half-width");
  }
  return profile;
}

InterfaceProfile mollify(const InterfaceProfile& profile, double width) {
  const double h = profile.grid().spacing();
  if (!(width > h)) return profile;
  const int reach = static_cast<int>(std::ceil(width / h));
  std::vector<double> weight(static_cast<std::size_t>(2 * reach + 1), 0.0);
  double mass = 0.0;
  for (int j = -reach; j <= reach; ++j) {
    const double z = j * h / width;
    if (std::abs(z) < 1.0) weight[static_cast<std::size_t>(j + reach)] = std::exp(-1.0 / (1.0 - z * z));
    mass += weight[static_cast<std::size_t>(j + reach)];
  }
  for (double& w : weight) w /= mass;
  std::vector<double> out(static_cast<std::size_t>(profile.size()));
  for (int i = 0; i < profile.size(); ++i) {
    double s = 0.0;
    for (int j = -reach; j <= reach; ++j) s += weight[static_cast<std::size_t>(j + reach)] * profile.at(i - j);
    out[static_cast<std::size_t>(i)] = s;
  }
  return profile.evolved(std::move(out), profile.time());
}

UnstableConfig rt_unstable_config(int wavenumber, double amplitude, double t_max) {
  UnstableConfig cfg;
  cfg.physics = PhysicsParams{-1.0};
  cfg.t_max = t_max;
  cfg.spec.left = cfg.spec.right = 0.0;
  cfg.spec.wavenumber = wavenumber;
  if (amplitude == 0.0) {
    cfg.spec.kind = ScenarioKind::constant;
    cfg.growth_rate = 0.0;
  } else {
    cfg.spec.kind = ScenarioKind::windowed_sine;
    cfg.spec.amplitude = amplitude;
    cfg.growth_rate = M_PI * std::abs(cfg.physics.density_coefficient) * wavenumber;
  }
  cfg.spec.validate();
  return cfg;
}

}  // namespace muskat
