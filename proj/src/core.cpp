#include "muskat/core.hpp"

#include <sstream>

#include "muskat/singular_ops.hpp"

namespace muskat {

Grid::Grid(double half_width, int point_count) : half_width_(half_width), h_(0.0), n_(point_count) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw Error("grid half-width must be positive and finite");
  }
  if (point_count < kMinPoints || point_count % 2 != 0) {
    throw Error("grid point count must be an even integer >= 16");
  }
  h_ = 2.0 * half_width / point_count;
}

std::vector<double> Grid::nodes() const {
  std::vector<double> x(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) x[static_cast<std::size_t>(i)] = node(i);
  return x;
}

InterfaceProfile::InterfaceProfile(Grid grid, std::vector<double> samples, FarField far_field, double time)
    : grid_(grid), samples_(std::move(samples)), far_field_(far_field), time_(time) {
  if (static_cast<int>(samples_.size()) != grid_.size()) {
    throw Error("profile sample count does not match the grid");
  }
  if (!std::isfinite(far_field_.left) || !std::isfinite(far_field_.right) || !std::isfinite(far_field_.tilt)) {
    throw Error("far-field data must be finite");
  }
  for (double v : samples_) {
    if (!std::isfinite(v)) throw Error("profile contains non-finite samples");
  }
}

double InterfaceProfile::operator()(double x) const {
  const double L = grid_.half_width();
  if (x < -L) return far_field_.left;
  if (x >= L) return far_field_.right;
  const double s = (x + L) / grid_.spacing();
  const int i = static_cast<int>(std::floor(s));
  const double w = s - i;
  return (1.0 - w) * at(i) + w * at(i + 1);
}

InterfaceProfile InterfaceProfile::evolved(std::vector<double> samples, double time) const {
  return InterfaceProfile(grid_, std::move(samples), far_field_, time);
}

PhysicsParams PhysicsParams::from_densities(double rho_upper, double rho_lower) {
  return PhysicsParams{(rho_lower - rho_upper) / (2.0 * M_PI)};
}

void RegularizationParams::validate() const {
  if (!(kernel_exponent >= 0.0 && kernel_exponent < 0.5)) {
    throw Error("kernel_exponent must lie in [0, 0.5)");
  }
  if (!(local_viscosity >= 0.0)) throw Error("local_viscosity must be non-negative");
  if (!(dissipation_constant >= 0.0)) throw Error("dissipation_constant must be positive (0 selects the default)");
  if (!(mollifier_width >= 0.0)) throw Error("mollifier_width must be non-negative");
}

double RegularizationParams::effective_dissipation_constant() const {
  if (dissipation_constant > 0.0) return dissipation_constant;
  return 8.0 / ops::lambda_normalization(1.0 - kernel_exponent);
}

Trajectory::Trajectory(std::string scheme, std::string parameters)
    : scheme_(std::move(scheme)), parameters_(std::move(parameters)) {}

void Trajectory::append(InterfaceProfile profile, std::optional<DiagnosticsRecord> record) {
  if (!entries_.empty()) {
    const auto& last = entries_.back().profile;
    if (!(profile.time() > last.time())) throw Error("trajectory times must be strictly increasing");
    if (!(profile.grid() == last.grid()) || !(profile.far_field() == last.far_field())) {
      throw Error("trajectory profiles must share one grid and far field");
    }
  }
  const double t = profile.time();
  entries_.push_back(TrajectoryEntry{t, std::move(profile), std::move(record)});
}

double default_far_field_tolerance(const FarField& far_field) {
  return 1e-8 * std::max(1.0, std::abs(far_field.left - far_field.right));
}

ValidationReport validate_profile(const InterfaceProfile& profile, const ValidationTolerances& tolerances) {
  return validate_samples(profile.grid(), profile.samples(), profile.far_field(), tolerances);
}

ValidationReport validate_samples(const Grid& grid, std::span<const double> f, const FarField& ff,
                                  const ValidationTolerances& tolerances) {
  if (static_cast<int>(f.size()) != grid.size()) throw Error("sample count does not match the grid");
  ValidationReport report;
  report.far_field_tolerance =
      tolerances.far_field >= 0.0 ? tolerances.far_field : default_far_field_tolerance(ff);
  for (double v : f) {
    if (!std::isfinite(v)) report.non_finite = true;
  }
  report.boundary_deviation_left = std::abs(f.front() - ff.left);
  report.boundary_deviation_right = std::abs(f.back() - ff.right);
  if (tolerances.check_monotone) {
    const double h = grid.spacing();
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) worst = std::max(worst, (f[i + 1] - f[i]) / h);
    report.monotone_violation = worst;
  }
  return report;
}

}  // namespace muskat
