#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace muskat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform grid on the truncated line [-L, L): x_i = -L + i*h, h = 2L/N.
class Grid {
 public:
  static constexpr int kMinPoints = 16;

  Grid(double half_width, int point_count);

  double half_width() const { return half_width_; }
  int size() const { return n_; }
  double spacing() const { return h_; }
  double node(int i) const { return -half_width_ + i * h_; }
  std::vector<double> nodes() const;

  bool operator==(const Grid& other) const = default;

 private:
  double half_width_;
  double h_;
  int n_;
};

/// Constant limits of the interface height and the background tilt.
/// The full interface is f(x) = tilt * x + f~(x), with f~ -> left as x -> -inf
/// and f~ -> right as x -> +inf.
struct FarField {
  double left = 0.0;
  double right = 0.0;
  double tilt = 0.0;

  bool decaying() const { return left == 0.0 && right == 0.0 && tilt == 0.0; }
  bool operator==(const FarField& other) const = default;
};

/// Samples of f~ on a grid, extended by the far-field constants off the grid.
/// Immutable once constructed.
class InterfaceProfile {
 public:
  InterfaceProfile(Grid grid, std::vector<double> samples, FarField far_field, double time = 0.0);

  const Grid& grid() const { return grid_; }
  std::span<const double> samples() const { return samples_; }
  const FarField& far_field() const { return far_field_; }
  double time() const { return time_; }
  int size() const { return grid_.size(); }

  /// Sample at node index i; indices off the grid return the far-field value.
  double at(int i) const {
    if (i < 0) return far_field_.left;
    if (i >= grid_.size()) return far_field_.right;
    return samples_[static_cast<std::size_t>(i)];
  }

  /// f~(x): linear interpolation on the grid, far-field extension outside.
  double operator()(double x) const;

  /// Successor profile on the same grid and far field.
  InterfaceProfile evolved(std::vector<double> samples, double time) const;

 private:
  Grid grid_;
  std::vector<double> samples_;
  FarField far_field_;
  double time_;
};

/// (rho2 - rho1) / (2 pi), after nondimensionalization.
struct PhysicsParams {
  double density_coefficient = 1.0;

  static PhysicsParams from_densities(double rho_upper, double rho_lower);
  /// Rayleigh-Taylor stable when the heavier fluid sits below.
  bool stable() const { return density_coefficient > 0.0; }
  bool operator==(const PhysicsParams& other) const = default;
};

struct RegularizationParams {
  double kernel_exponent = 0.05;  // epsilon in [0, 1/2)
  double local_viscosity = 0.1;   // epsilon' >= 0
  /// C > 0; zero selects the default 8 / c1(epsilon).
  double dissipation_constant = 0.0;
  double mollifier_width = 0.0;

  void validate() const;
  double effective_dissipation_constant() const;
  bool operator==(const RegularizationParams& other) const = default;
};

/// One row of monitored quantities for a single profile.
struct DiagnosticsRecord {
  double t = 0.0;
  double max_value = 0.0;  // M(t)
  double min_value = 0.0;  // m(t)
  double slope_max = 0.0;
  double slope_min = 0.0;
  int lap_number = 0;
  double l2_dxf = 0.0;
  double l2_dx3f = 0.0;
  double holder_d2f = 0.0;
  std::optional<double> energy_residual;
  double ff_dev_left = 0.0;
  double ff_dev_right = 0.0;
};

struct TrajectoryEntry {
  double time;
  InterfaceProfile profile;
  std::optional<DiagnosticsRecord> diagnostics;
};

/// Time-ordered snapshots sharing one grid and one far field.
class Trajectory {
 public:
  Trajectory(std::string scheme, std::string parameters = {});

  void append(InterfaceProfile profile, std::optional<DiagnosticsRecord> record = std::nullopt);

  const std::vector<TrajectoryEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const TrajectoryEntry& front() const { return entries_.front(); }
  const TrajectoryEntry& back() const { return entries_.back(); }
  const std::string& scheme() const { return scheme_; }
  const std::string& parameters() const { return parameters_; }

 private:
  std::string scheme_;
  std::string parameters_;
  std::vector<TrajectoryEntry> entries_;
};

struct ValidationTolerances {
  /// Negative selects the default 1e-8 * max(1, |a - b|).
  double far_field = -1.0;
  bool check_monotone = false;
};

struct ValidationReport {
  double boundary_deviation_left = 0.0;
  double boundary_deviation_right = 0.0;
  double far_field_tolerance = 0.0;
  bool non_finite = false;
  /// max_i (f_{i+1} - f_i) / h, clamped below at zero; only when requested.
  double monotone_violation = 0.0;

  double boundary_deviation() const {
    return std::max(boundary_deviation_left, boundary_deviation_right);
  }
  bool settled() const { return boundary_deviation() <= far_field_tolerance; }
  bool ok() const { return !non_finite && settled() && monotone_violation == 0.0; }
};

double default_far_field_tolerance(const FarField& far_field);

ValidationReport validate_profile(const InterfaceProfile& profile, const ValidationTolerances& tolerances = {});

/// Same checks on raw samples, which may contain NaN/Inf (a constructed
/// profile never does).
ValidationReport validate_samples(const Grid& grid, std::span<const double> samples, const FarField& far_field,
                                  const ValidationTolerances& tolerances = {});

}  // namespace muskat
