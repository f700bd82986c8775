#pragma once

#include <string>
#include <vector>

#include "muskat/core.hpp"
#include "muskat/diagnostics.hpp"

namespace muskat {

/// Raised when a step produces non-finite values or trips the blow-up detector.
class NumericalAbort : public Error {
 public:
  using Error::Error;
};

enum class Scheme { cde, regularized, local };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct StepControl {
  double dt_max = 0.05;
  double sigma = 0.4;       // safety factor in (0, 1]
  double t_end = 1.0;
  int snapshot_stride = 1;

  void validate() const;
  bool operator==(const StepControl& other) const = default;
};

/// f_t = Aρ PV∫ ∂x Δ^ε f / (1 + (Δ^ε f)²) dα - dissipation Λ^{1-ε} f + viscosity f_xx.
struct RegularizedSystem {
  double kernel_exponent = 0.0;
  double viscosity = 0.0;
  double dissipation = 0.0;

  /// The global regularization: (ε, ε, ε C).
  static RegularizedSystem global(const RegularizationParams& reg);
  /// The local approximate system: (ε', ε', 0).
  static RegularizedSystem local(const RegularizationParams& reg);
};

/// Largest |eigenvalue| of the explicit part linearized about the tilt β,
/// from the exact symbols of the discrete operators.
double explicit_stability_radius(const Grid& grid, const PhysicsParams& physics, const RegularizedSystem& system,
                                 double tilt = 0.0);

/// min(dt_max, σ h / max(1, ‖v‖∞), stability_limit).
double choose_dt(const Grid& grid, double velocity_sup, const StepControl& control, double stability_limit);

/// Classical RK4 step of the contour equation (ε = 0).
InterfaceProfile step_cde(const InterfaceProfile& profile, const PhysicsParams& physics, double dt);

/// IMEX Euler step: nonlocal terms explicit, viscosity implicit through a
/// tridiagonal solve with the far-field values as ghost nodes.
InterfaceProfile step_imex(const InterfaceProfile& profile, const PhysicsParams& physics,
                           const RegularizedSystem& system, double dt);

/// step_imex for the global regularized system built from `reg`.
InterfaceProfile step_regularized(const InterfaceProfile& profile, const PhysicsParams& physics,
                                  const RegularizationParams& reg, double dt);

/// Exact linear flow f_t = -π Aρ Λ f; each Fourier mode scales by e^{-π Aρ |ξ| t}.
InterfaceProfile linear_evolve(const InterfaceProfile& profile, double t, const PhysicsParams& physics);

/// e^{ν t ∂xx} applied to the far-field extension of the profile, with the
/// samples read as cell averages (exact erf weights).
InterfaceProfile heat_evolve(const InterfaceProfile& profile, double viscosity, double t);

struct PicardOptions {
  double tol = 1e-11;
  int max_iter = 40;
  bool zero_forcing = false;  // replaces F by 0 (pure heat flow)
};

struct PicardReport {
  std::vector<double> distances;  // d_n = ‖f_{n+1} - f_n‖∞, n = 0, 1, ...
  std::vector<double> ratios;     // d_{n+1} / d_n
  bool converged = false;
  int iterations = 0;             // applications of S
  int fixed_point_iterate = -1;   // smallest k >= 1 with d_k <= tol
};

struct PicardResult {
  Trajectory trajectory;
  PicardReport report;
};

/// Fixed point of Sf = e^{ν t Δ} f0 + ∫_0^t e^{ν (t-s) Δ} F(f(s)) ds on M + 1
/// equispaced time nodes, F = Aρ times the velocity at kernel exponent ν.
PicardResult picard_local_solve(const InterfaceProfile& initial, const PhysicsParams& physics, double viscosity,
                                double t_end, int time_nodes, const PicardOptions& options = {});

struct SimulationSetup {
  Scheme scheme = Scheme::cde;
  PhysicsParams physics;
  RegularizationParams regularization;
  StepControl control;
  DiagnosticsOptions diagnostics;
};

struct SimulationResult {
  Trajectory trajectory;
  int steps = 0;
  std::string abort_reason;  // empty on success

  bool aborted() const { return !abort_reason.empty(); }
};

/// Steps to control.t_end, recording snapshots with diagnostics every
/// snapshot_stride steps and at the end. Aborts return the partial trajectory.
SimulationResult simulate(const InterfaceProfile& initial, const SimulationSetup& setup);

}  // namespace muskat
