#include "muskat/evolution.hpp"

#include <cmath>

#include "muskat/numerics.hpp"
#include "muskat/parallel.hpp"
#include "muskat/singular_ops.hpp"

namespace muskat {

namespace {

double sup(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double slope_sup(const InterfaceProfile& p) { return sup(numerics::first_derivative(p.samples(), p.grid().spacing())); }

// Builds the successor, turning non-finite samples into an abort.
InterfaceProfile successor(const InterfaceProfile& p, std::vector<double> samples, double time) {
  for (double v : samples) {
    if (!std::isfinite(v)) throw NumericalAbort("aborted: non-finite values");
  }
  return p.evolved(std::move(samples), time);
}

void check_blow_up(const InterfaceProfile& before, const InterfaceProfile& after) {
  const double old_slope = slope_sup(before);
  if (slope_sup(after) > 2.0 * std::max(old_slope, 1e-6)) throw NumericalAbort("aborted: slope doubling");
}

std::vector<double> axpy(std::span<const double> x, double a, std::span<const double> y) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + a * y[i];
  return r;
}

std::vector<double> explicit_rhs(const InterfaceProfile& p, const PhysicsParams& physics,
                                 const RegularizedSystem& system) {
  auto v = ops::pv_velocity(p, physics, system.kernel_exponent);
  if (system.dissipation != 0.0) {
    const auto lam = ops::lambda_power(p, 1.0 - system.kernel_exponent, ops::Backend::kernel);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= system.dissipation * lam[i];
  }
  return v;
}

InterfaceProfile rk4(const InterfaceProfile& p, const PhysicsParams& physics, double dt, std::vector<double> k1) {
  const auto f = p.samples();
  const double t = p.time();
  auto stage = [&](std::span<const double> k, double c) {
    return ops::pv_velocity(successor(p, axpy(f, c * dt, k), t + c * dt), physics, 0.0);
  };
  const auto k2 = stage(k1, 0.5);
  const auto k3 = stage(k2, 0.5);
  const auto k4 = stage(k3, 1.0);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  auto next = successor(p, std::move(out), t + dt);
  check_blow_up(p, next);
  return next;
}

// Solves (I - r D2) u = rhs with ghost values u_{-1} = a, u_N = b.
std::vector<double> implicit_diffusion(std::vector<double> rhs, double r, double a, double b) {
  const std::size_t n = rhs.size();
  rhs.front() += r * a;
  rhs.back() += r * b;
  const double diag = 1.0 + 2.0 * r;
  std::vector<double> c(n);
  c[0] = -r / diag;
  rhs[0] /= diag;
  for (std::size_t i = 1; i < n; ++i) {
    const double m = diag + r * c[i - 1];
    c[i] = -r / m;
    rhs[i] = (rhs[i] + r * rhs[i - 1]) / m;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
  return rhs;
}

InterfaceProfile imex(const InterfaceProfile& p, const RegularizedSystem& system, double dt,
                      const std::vector<double>& rhs) {
  auto u = axpy(p.samples(), dt, rhs);
  if (system.viscosity > 0.0) {
    const double h = p.grid().spacing();
    u = implicit_diffusion(std::move(u), dt * system.viscosity / (h * h), p.far_field().left, p.far_field().right);
  }
  auto next = successor(p, std::move(u), p.time() + dt);
  check_blow_up(p, next);
  return next;
}

void check_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("time step must be positive and finite");
}

std::vector<double> heat_stencil(double h, double viscosity, double t) {
  if (t <= 0.0 || viscosity <= 0.0) return {1.0};
  const double width = 2.0 * std::sqrt(viscosity * t);
  const int reach = static_cast<int>(std::ceil(10.0 * width / h)) + 1;
  std::vector<double> w(static_cast<std::size_t>(2 * reach + 1));
  for (int j = -reach; j <= reach; ++j) {
    w[static_cast<std::size_t>(j + reach)] =
        0.5 * (std::erf((j * h + 0.5 * h) / width) - std::erf((j * h - 0.5 * h) / width));
  }
  return w;
}

std::vector<double> convolve(std::span<const double> f, double left, double right, const std::vector<double>& w) {
  const int n = static_cast<int>(f.size());
  const int reach = static_cast<int>(w.size() / 2);
  std::vector<double> out(f.size());
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = -reach; j <= reach; ++j) {
      const int k = i - j;
      const double v = k < 0 ? left : (k >= n ? right : f[static_cast<std::size_t>(k)]);
      s += w[static_cast<std::size_t>(j + reach)] * v;
    }
    out[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

}  // namespace

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::cde: return "cde";
    case Scheme::regularized: return "regularized";
    case Scheme::local: return "local";
  }
  return "unknown";
}

Scheme scheme_from_string(const std::string& name) {
  for (auto s : {Scheme::cde, Scheme::regularized, Scheme::local}) {
    if (to_string(s) == name) return s;
  }
  throw Error("unknown scheme '" + name + "' (expected cde, regularized or local)");
}

void StepControl::validate() const {
  if (!(dt_max > 0.0)) throw Error("dt_max must be positive");
  if (!(sigma > 0.0 && sigma <= 1.0)) throw Error("sigma must lie in (0, 1]");
  if (!(t_end > 0.0)) throw Error("final time must be positive");
  if (snapshot_stride < 1) throw Error("snapshot stride must be at least 1");
}

RegularizedSystem RegularizedSystem::global(const RegularizationParams& reg) {
  reg.validate();
  const double eps = reg.kernel_exponent;
  return RegularizedSystem{eps, eps, eps == 0.0 ? 0.0 : eps * reg.effective_dissipation_constant()};
}

RegularizedSystem RegularizedSystem::local(const RegularizationParams& reg) {
  reg.validate();
  if (!(reg.local_viscosity < 0.5)) throw Error("local_viscosity doubles as the kernel exponent and must be < 0.5");
  return RegularizedSystem{reg.local_viscosity, reg.local_viscosity, 0.0};
}

double explicit_stability_radius(const Grid& grid, const PhysicsParams& physics, const RegularizedSystem& system,
                                 double tilt) {
  const int n = grid.size();
  const double h = grid.spacing();
  const double eps = system.kernel_exponent;
  const double kappa = ops::detail::singular_cell_weight(h, eps, tilt);
  std::vector<double> vel_weight(static_cast<std::size_t>(n + 1)), lam_weight(static_cast<std::size_t>(n + 1));
  for (int j = 1; j <= n; ++j) {
    const double w = std::pow(j * h, eps);
    vel_weight[static_cast<std::size_t>(j)] = w / j / (1.0 + w * w * tilt * tilt);
    lam_weight[static_cast<std::size_t>(j)] = 2.0 / std::pow(j, 2.0 - eps);
  }
  const double s = 1.0 - eps;
  const double c1 = system.dissipation != 0.0 ? ops::lambda_normalization(s) : 0.0;
  const double zeta = std::riemann_zeta(s - 1.0);
  constexpr int kSamples = 512;
  double rho = 0.0;
  for (int m = 1; m <= kSamples; ++m) {
    const double theta = M_PI * m / kSamples;
    const double d = (8.0 * std::sin(theta) - std::sin(2.0 * theta)) / (6.0 * h);
    const double s2 = std::sin(0.5 * theta) * std::sin(0.5 * theta);
    double sv = 0.0, sl = 0.0;
    for (int j = 1; j <= n; ++j) {
      sv += vel_weight[static_cast<std::size_t>(j)] * std::sin(theta * j);
      if (c1 != 0.0) sl += lam_weight[static_cast<std::size_t>(j)] * (1.0 - std::cos(theta * j));
    }
    const double lv = -2.0 * d * sv - kappa * 4.0 / (h * h) * s2;
    const double ll = c1 * std::pow(h, -s) * (sl - 4.0 * zeta * s2);
    rho = std::max(rho, std::abs(physics.density_coefficient * lv - system.dissipation * ll));
  }
  return rho;
}

double choose_dt(const Grid& grid, double velocity_sup, const StepControl& control, double stability_limit) {
  return std::min({control.dt_max, control.sigma * grid.spacing() / std::max(1.0, velocity_sup), stability_limit});
}

InterfaceProfile step_cde(const InterfaceProfile& profile, const PhysicsParams& physics, double dt) {
  check_dt(dt);
  return rk4(profile, physics, dt, ops::pv_velocity(profile, physics, 0.0));
}

InterfaceProfile step_imex(const InterfaceProfile& profile, const PhysicsParams& physics,
                           const RegularizedSystem& system, double dt) {
  check_dt(dt);
  return imex(profile, system, dt, explicit_rhs(profile, physics, system));
}

InterfaceProfile step_regularized(const InterfaceProfile& profile, const PhysicsParams& physics,
                                  const RegularizationParams& reg, double dt) {
  return step_imex(profile, physics, RegularizedSystem::global(reg), dt);
}

InterfaceProfile linear_evolve(const InterfaceProfile& profile, double t, const PhysicsParams& physics) {
  if (t == 0.0) return profile;
  const double rate = M_PI * physics.density_coefficient;
  auto out = ops::detail::spectral_multiply(
      profile, [rate, t](double xi) { return std::complex<double>(std::exp(-rate * std::abs(xi) * t)); });
  return profile.evolved(std::move(out), profile.time() + t);
}

InterfaceProfile heat_evolve(const InterfaceProfile& profile, double viscosity, double t) {
  if (!(viscosity >= 0.0) || !(t >= 0.0)) throw Error("heat flow needs non-negative viscosity and time");
  const auto w = heat_stencil(profile.grid().spacing(), viscosity, t);
  auto out = convolve(profile.samples(), profile.far_field().left, profile.far_field().right, w);
  return profile.evolved(std::move(out), profile.time() + t);
}

PicardResult picard_local_solve(const InterfaceProfile& initial, const PhysicsParams& physics, double viscosity,
                                double t_end, int time_nodes, const PicardOptions& options) {
  if (!(viscosity > 0.0 && viscosity < 0.5)) throw Error("local viscosity must lie in (0, 0.5)");
  if (!(t_end > 0.0)) throw Error("final time must be positive");
  if (time_nodes < 1) throw Error("need at least one time interval");
  const int M = time_nodes;
  const double dt = t_end / M;
  const double h = initial.grid().spacing();
  const FarField& ff = initial.far_field();
  std::vector<std::vector<double>> stencils;
  for (int q = 0; q <= M; ++q) stencils.push_back(heat_stencil(h, viscosity, q * dt));
  std::vector<std::vector<double>> background;
  for (int m = 0; m <= M; ++m) background.push_back(convolve(initial.samples(), ff.left, ff.right, stencils[m]));

  std::vector<std::vector<double>> current(static_cast<std::size_t>(M + 1),
                                           std::vector<double>(initial.samples().begin(), initial.samples().end()));
  auto apply_s = [&](const std::vector<std::vector<double>>& f) {
    std::vector<std::vector<double>> forcing(static_cast<std::size_t>(M + 1));
    for (int l = 0; l <= M; ++l) {
      if (options.zero_forcing) {
        forcing[l].assign(f[l].size(), 0.0);
      } else {
        forcing[l] = ops::pv_velocity(initial.evolved(f[l], initial.time() + l * dt), physics, viscosity);
      }
    }
    std::vector<std::vector<double>> out = background;
    parallel_for(M + 1, [&](int begin, int end) {
      for (int m = begin; m < end; ++m) {
        for (int l = 0; l <= m && m > 0; ++l) {
          const double weight = (l == 0 || l == m) ? 0.5 * dt : dt;
          const auto g = convolve(forcing[l], 0.0, 0.0, stencils[m - l]);
          for (std::size_t i = 0; i < g.size(); ++i) out[m][i] += weight * g[i];
        }
      }
    });
    return out;
  };

  PicardReport report;
  int non_contracting = 0;
  for (int it = 1; it <= options.max_iter; ++it) {
    auto next = apply_s(current);
    double d = 0.0;
    for (int m = 0; m <= M; ++m) {
      for (std::size_t i = 0; i < next[m].size(); ++i) {
        if (!std::isfinite(next[m][i])) throw NumericalAbort("aborted: non-finite Picard iterate");
        d = std::max(d, std::abs(next[m][i] - current[m][i]));
      }
    }
    report.distances.push_back(d);
    report.iterations = it;
    current = std::move(next);
    const std::size_t k = report.distances.size();
    if (k >= 2 && report.distances[k - 2] > 0.0) {
      const double r = d / report.distances[k - 2];
      report.ratios.push_back(r);
      non_contracting = r >= 1.0 ? non_contracting + 1 : 0;
    }
    if (report.fixed_point_iterate < 0 && k >= 2 && d <= options.tol) report.fixed_point_iterate = static_cast<int>(k - 1);
    if (it >= 2 && d <= options.tol) break;
    if (non_contracting >= 3) break;
  }
  const double d_last = report.distances.back();
  bool contracting = d_last == 0.0;
  if (!contracting && report.ratios.size() >= 3) {
    contracting = std::all_of(report.ratios.end() - 3, report.ratios.end(), [](double r) { return r < 1.0; });
  }
  report.converged = d_last <= options.tol && contracting;

  PicardResult result{Trajectory("picard", "viscosity=" + std::to_string(viscosity)), report};
  for (int m = 0; m <= M; ++m) result.trajectory.append(initial.evolved(current[m], initial.time() + m * dt));
  return result;
}

SimulationResult simulate(const InterfaceProfile& initial, const SimulationSetup& setup) {
  setup.control.validate();
  setup.regularization.validate();
  const auto& control = setup.control;
  const auto& physics = setup.physics;
  RegularizedSystem system;
  if (setup.scheme == Scheme::regularized) system = RegularizedSystem::global(setup.regularization);
  if (setup.scheme == Scheme::local) system = RegularizedSystem::local(setup.regularization);
  const double rho = explicit_stability_radius(initial.grid(), physics, system, initial.far_field().tilt);
  // RK4 is stable on [-2.78, 0] of the real axis, forward Euler on [-2, 0]; both keep a margin.
  const double limit = rho > 0.0 ? (setup.scheme == Scheme::cde ? 2.5 : 1.0) / rho : INFINITY;

  SimulationResult result{Trajectory(to_string(setup.scheme)), 0, {}};
  // The L2 energy law belongs to the exact system with decaying data.
  const bool track_energy = setup.scheme == Scheme::cde && initial.far_field().decaying();
  double energy0 = 0.0, dissipation_prev = 0.0, dissipation_integral = 0.0, t_prev = initial.time();
  auto record = [&](const InterfaceProfile& p) {
    auto r = record_diagnostics(p, setup.diagnostics);
    if (track_energy) {
      const double d = energy_dissipation(p);
      if (p.time() == initial.time()) {
        energy0 = l2_norm_squared(p);
      } else {
        dissipation_integral += 0.5 * (p.time() - t_prev) * (d + dissipation_prev);
      }
      dissipation_prev = d;
      t_prev = p.time();
      r.energy_residual = l2_norm_squared(p) + physics.density_coefficient * dissipation_integral - energy0;
    }
    return r;
  };
  result.trajectory.append(initial, record(initial));
  InterfaceProfile current = initial;
  const double t_final = initial.time() + control.t_end;
  try {
    while (current.time() < t_final - 1e-12 * control.t_end) {
      std::vector<double> rhs = ops::pv_velocity(current, physics, system.kernel_exponent);
      const double vsup = sup(rhs);
      if (system.dissipation != 0.0) {
        const auto lam = ops::lambda_power(current, 1.0 - system.kernel_exponent, ops::Backend::kernel);
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= system.dissipation * lam[i];
      }
      double dt = choose_dt(current.grid(), vsup, control, limit);
      if (current.time() + dt > t_final) dt = t_final - current.time();
      current = setup.scheme == Scheme::cde ? rk4(current, physics, dt, std::move(rhs))
                                            : imex(current, system, dt, rhs);
      ++result.steps;
      const bool last = current.time() >= t_final - 1e-12 * control.t_end;
      if (result.steps % control.snapshot_stride == 0 || last) result.trajectory.append(current, record(current));
    }
  } catch (const NumericalAbort& e) {
    result.abort_reason = e.what();
  }
  return result;
}

}  // namespace muskat
