#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "muskat/core.hpp"

namespace muskat::ops {

/// Radius out to which sources off the grid are summed numerically with their
/// far-field values before the analytic tail takes over. Zero starts the
/// analytic tail at the grid edges.
struct TailSpec {
  double radius = 0.0;
};

/// Delta_alpha^eps f(x_i) = (f(x) - f(x - alpha)) |alpha|^eps / alpha, for
/// eps in [0, 1). Off-grid x - alpha interpolates linearly.
double regularized_difference(const InterfaceProfile& profile, int node, double alpha, double epsilon);

/// Aρ PV∫ ∂x Δ_α^ε f / (1 + (Δ_α^ε f)^2) dα at every node, with f = βx + f~.
std::vector<double> pv_velocity(const InterfaceProfile& profile, const PhysicsParams& physics, double epsilon,
                                const TailSpec& tail = {});

/// Same quadrature as pv_velocity, summed in a single left-to-right loop.
std::vector<double> velocity_reference_oracle(const InterfaceProfile& profile, const PhysicsParams& physics,
                                              double epsilon, const TailSpec& tail = {});

/// Φ(x_i) = PV∫ arctan(Δ_α f) dα with the x-independent divergent part of the
/// far-field tails removed. Requires tilt 0.
double arctan_flux(const InterfaceProfile& profile, int node, const TailSpec& tail = {});
std::vector<double> arctan_flux_field(const InterfaceProfile& profile, const TailSpec& tail = {});

enum class Backend { spectral, kernel };

/// c1(s) such that c1 ∫ (f(x) - f(x-α)) / |α|^{1+s} dα has symbol |k|^s.
double lambda_normalization(double order);

/// Λ^s applied to f~. The spectral backend treats the samples as periodic on
/// [-L, L) and requires decaying data.
std::vector<double> lambda_power(const InterfaceProfile& profile, double order, Backend backend);

/// H f(x) = (1/π) PV∫ f(x-α)/α dα. The kernel backend requires equal limits.
std::vector<double> hilbert_transform(const InterfaceProfile& profile, Backend backend = Backend::spectral);

/// Exact velocity-integrand tail for sources at α > left_radius (value a) and
/// α < -right_radius (value b). `value` and `slope` are f~(x) and ∂x f~(x).
/// ε = 0 is closed form; ε > 0 uses Gauss-Legendre in log α.
double velocity_tail(double value, double slope, const FarField& far_field, double epsilon, double left_radius,
                     double right_radius);

/// The numeric route of velocity_tail, usable at any ε.
double velocity_tail_numeric(double value, double slope, const FarField& far_field, double epsilon,
                             double left_radius, double right_radius);

/// Symmetric-radius velocity_tail.
double tail_correction(double value, double slope, const FarField& far_field, double radius, double epsilon = 0.0);

/// Midpoint sum over α = jh with the far field out to `radius` on both sides
/// and no tail. Slow; used to check the analytic tails.
std::vector<double> velocity_brute_force(const InterfaceProfile& profile, const PhysicsParams& physics,
                                         double epsilon, double radius);

namespace detail {

/// Periodic FFT on [-L, L): multiplies the mode with wavenumber ξ = π m / L by
/// multiplier(ξ). Requires decaying data.
std::vector<double> spectral_multiply(const InterfaceProfile& profile,
                                      const std::function<std::complex<double>(double)>& multiplier);

/// Weight multiplying ∂x² f~ in the α→0 correction of an interior node, for
/// slope-plus-tilt c. Equals h at ε = 0.
double singular_cell_weight(double h, double epsilon, double c);

/// Quadrature terms for node i in summation order: sources from left to
/// right, then the α→0 correction, then the far-field tail.
struct VelocityContext;

class VelocityKernel {
 public:
  VelocityKernel(const InterfaceProfile& profile, double epsilon, const TailSpec& tail);
  ~VelocityKernel();
  VelocityKernel(const VelocityKernel&) = delete;
  VelocityKernel& operator=(const VelocityKernel&) = delete;

  /// Fills `out` with the terms for node i and returns the count.
  std::size_t terms(int node, std::vector<double>& out) const;
  std::size_t max_terms() const;

 private:
  std::unique_ptr<VelocityContext> ctx_;
};

}  // namespace detail

}  // namespace muskat::ops
