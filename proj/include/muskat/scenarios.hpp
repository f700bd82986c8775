#pragma once

#include <string>

#include "muskat/core.hpp"

namespace muskat {

enum class ScenarioKind { constant, tanh_step, smoothed_ramp, bump, windowed_sine, tilted };

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& name);

/// Parameters for the analytic initial data. Unused fields are ignored by
/// kinds that do not need them.
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::tanh_step;
  double left = 1.0;        // a
  double right = -1.0;      // b
  double steepness = 1.0;   // s (tanh_step, tilted)
  double center = 0.0;
  double amplitude = 1.0;   // δ (bump, windowed_sine)
  double width = 1.0;       // bump width w; half-width of the smoothed ramp
  int wavenumber = 1;       // k (windowed_sine)
  double tilt = 0.0;        // β (tilted)
  double half_width = 40.0;
  int points = 2048;
  double mollifier_width = 0.0;

  /// Throws Error on parameter violations.
  void validate() const;
  bool operator==(const ScenarioSpec& other) const = default;
};

/// Monotone smooth step: 0 for t <= 0, 1 for t >= 1, C-infinity in between.
double smoothstep(double t);

/// C-infinity window equal to 1 on |x| <= plateau and 0 on |x| >= support.
double smooth_window(double x, double plateau, double support);

/// Samples the scenario on its grid and applies the mollifier when its width
/// exceeds h. Throws if the data do not settle to the far field inside [-L, L).
InterfaceProfile make_profile(const ScenarioSpec& spec);

/// Discrete convolution with the unit-mass bump exp(-1/(1-(x/width)^2)),
/// far-field values beyond the grid. Width <= h returns the input unchanged.
InterfaceProfile mollify(const InterfaceProfile& profile, double width);

struct UnstableConfig {
  ScenarioSpec spec;
  PhysicsParams physics;
  double t_max = 0.0;
  /// Linear growth rate π |Aρ| k of the seeded mode.
  double growth_rate = 0.0;
};

/// Rayleigh-Taylor unstable windowed-sine setup (Aρ = -1). δ = 0 yields the
/// zero profile.
UnstableConfig rt_unstable_config(int wavenumber, double amplitude, double t_max);

}  // namespace muskat
