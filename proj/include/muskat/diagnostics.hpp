#pragma once

#include <functional>
#include <vector>

#include "muskat/core.hpp"

namespace muskat {

struct DiagnosticsOptions {
  double gamma = 0.25;           // Hölder exponent for |∂x² f|_{C^γ}, in (0, 1/2)
  double probe_fraction = 0.9;   // far-field probes at ±fraction·L
  bool operator==(const DiagnosticsOptions& other) const = default;
};

/// Slope threshold below which ∂x f counts as zero when counting laps.
double lap_slope_floor(const InterfaceProfile& profile);

/// Sign changes of ∂x f~ after zeroing |∂x f~| <= lap_slope_floor.
int lap_number(const InterfaceProfile& profile);

/// Discrete Hölder seminorm of ∂x² f~ over node pairs with h <= |x-y| <= L/4.
double holder_seminorm_d2(const InterfaceProfile& profile, double gamma);

/// Monitored quantities for one profile. Slopes and extrema refer to the
/// evolved unknown f~; the energy residual is left empty.
DiagnosticsRecord record_diagnostics(const InterfaceProfile& profile, const DiagnosticsOptions& options = {});

/// sup over the whole line of |f~|, far field included.
double sup_norm(const InterfaceProfile& profile);

/// ‖f‖²_{L²} by the trapezoid rule. Requires a = b = 0.
double l2_norm_squared(const InterfaceProfile& profile);

/// ∫∫ ln(1 + ((f(x)-f(y))/(x-y))²) dx dy on the grid, diagonal cells by the
/// limit ln(1 + f'(x)²), off-grid parts in closed form. Requires a = b = 0.
double energy_dissipation(const InterfaceProfile& profile);

/// residual(t_n) = ‖f(t_n)‖² + Aρ ∫_0^{t_n} D(f) ds - ‖f_0‖², trapezoid in time
/// over the trajectory snapshots.
std::vector<double> energy_identity_residual(const Trajectory& trajectory, const PhysicsParams& physics);

/// Smooth test function φ(x, t) with support in [x_min, x_max] × [0, t_max).
struct TestFunction {
  std::function<double(double, double)> value, dt, dx;
  double x_min = 0.0, x_max = 0.0, t_max = 0.0;
};

/// Separable bump φ = ψ(x) χ(t) with ψ supported in |x - 0.1 L| < 0.35 L
/// (off-centre, so odd data do not cancel by symmetry), χ(0) = 1 and χ = 0
/// for t >= 0.45 T.
TestFunction default_test_function(double half_width, double final_time);

/// ∫∫ f φ_t + ∫ f_0 φ(·,0) - Aρ ∫∫ Φ φ_x with the arctan flux Φ. Requires an
/// untilted trajectory; trapezoid in x over the grid and in t over snapshots.
double weak_form_residual(const Trajectory& trajectory, const PhysicsParams& physics, const TestFunction& phi);

struct DispersionFit {
  double rate = 0.0;
  std::vector<double> times;
  std::vector<double> amplitudes;
};

/// Least-squares slope of ln|amplitude_k(t)|, with the amplitude of
/// sin(kx), cos(kx) fitted on |x| <= plateau_fraction · L.
DispersionFit dispersion_fit(const Trajectory& trajectory, double wavenumber, double plateau_fraction = 0.5);

struct MonotonicityVerdict {
  double slope_max = 0.0;        // max over snapshots of max ∂x f~
  double slope_min = 0.0;        // min over snapshots of min ∂x f~
  double slope_min_drop = 0.0;   // slope_min(0) - min_t slope_min(t)
  double sup_drift = 0.0;        // max_t ‖f~‖∞ - ‖f~_0‖∞
  double min_value_drop = 0.0;   // b - min_t m(t)
  double full_slope_max = 0.0;   // max over snapshots of β + max ∂x f~
  int lap_max = 0;
  bool pass = false;             // untilted maximum principles within tol
  bool tilted_pass = false;      // β + ∂x f~ <= β/2 + tol (β < 0 stored)
};

MonotonicityVerdict monotonicity_guard(const Trajectory& trajectory, double tol);

}  // namespace muskat
