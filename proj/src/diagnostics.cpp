#include "muskat/diagnostics.hpp"

#include <cmath>

#include "muskat/numerics.hpp"
#include "muskat/parallel.hpp"
#include "muskat/scenarios.hpp"
#include "muskat/singular_ops.hpp"

namespace muskat {

namespace {

std::vector<double> slopes(const InterfaceProfile& p) {
  return numerics::first_derivative(p.samples(), p.grid().spacing());
}

void require_decaying(const InterfaceProfile& p) {
  const auto& ff = p.far_field();
  if (ff.left != 0.0 || ff.right != 0.0 || ff.tilt != 0.0) {
    throw Error("the L2 energy identity needs decaying data (a = b = 0, no tilt)");
  }
}

// ∫_A^∞ ln(1 + c²/u²) du
double log_tail(double c, double A) {
  const double ac = std::abs(c);
  if (ac == 0.0) return 0.0;
  return M_PI * ac - A * std::log1p(c * c / (A * A)) - 2.0 * ac * std::atan(A / ac);
}

}  // namespace

double lap_slope_floor(const InterfaceProfile& profile) {
  const auto& ff = profile.far_field();
  return 1e-7 * std::max(1.0, (ff.left - ff.right) / profile.grid().half_width());
}

int lap_number(const InterfaceProfile& profile) {
  const double floor = lap_slope_floor(profile);
  int laps = 0, last = 0;
  for (double d : slopes(profile)) {
    const int s = std::abs(d) <= floor ? 0 : (d > 0.0 ? 1 : -1);
    if (s == 0) continue;
    if (last != 0 && s != last) ++laps;
    last = s;
  }
  return laps;
}

double holder_seminorm_d2(const InterfaceProfile& profile, double gamma) {
  if (!(gamma > 0.0 && gamma < 0.5)) throw Error("Hölder exponent must lie in (0, 0.5)");
  const double h = profile.grid().spacing();
  const auto d2 = numerics::second_derivative(profile.samples(), h);
  const int n = profile.size();
  const int reach = std::max(1, static_cast<int>(std::floor(0.25 * profile.grid().half_width() / h)));
  std::vector<double> inv(static_cast<std::size_t>(reach + 1));
  for (int j = 1; j <= reach; ++j) inv[static_cast<std::size_t>(j)] = std::pow(j * h, -gamma);
  std::vector<double> row(static_cast<std::size_t>(n), 0.0);
  parallel_for(n, [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      double m = 0.0;
      for (int j = 1; j <= reach && i + j < n; ++j) {
        m = std::max(m, std::abs(d2[static_cast<std::size_t>(i)] - d2[static_cast<std::size_t>(i + j)]) *
                            inv[static_cast<std::size_t>(j)]);
      }
      row[static_cast<std::size_t>(i)] = m;
    }
  });
  double m = 0.0;
  for (double r : row) m = std::max(m, r);
  return m;
}

double sup_norm(const InterfaceProfile& profile) {
  double m = std::max(std::abs(profile.far_field().left), std::abs(profile.far_field().right));
  for (double v : profile.samples()) m = std::max(m, std::abs(v));
  return m;
}

DiagnosticsRecord record_diagnostics(const InterfaceProfile& profile, const DiagnosticsOptions& options) {
  if (!(options.probe_fraction > 0.0 && options.probe_fraction < 1.0)) {
    throw Error("probe fraction must lie in (0, 1)");
  }
  const double h = profile.grid().spacing();
  const auto s = profile.samples();
  DiagnosticsRecord r;
  r.t = profile.time();
  r.max_value = *std::max_element(s.begin(), s.end());
  r.min_value = *std::min_element(s.begin(), s.end());
  const auto d1 = slopes(profile);
  r.slope_max = *std::max_element(d1.begin(), d1.end());
  r.slope_min = *std::min_element(d1.begin(), d1.end());
  r.lap_number = lap_number(profile);
  std::vector<double> sq(d1.size());
  for (std::size_t i = 0; i < d1.size(); ++i) sq[i] = d1[i] * d1[i];
  r.l2_dxf = std::sqrt(numerics::trapezoid(sq, h));
  const auto d3 = numerics::third_derivative(s, h);
  for (std::size_t i = 0; i < d3.size(); ++i) sq[i] = d3[i] * d3[i];
  r.l2_dx3f = std::sqrt(numerics::trapezoid(sq, h));
  r.holder_d2f = holder_seminorm_d2(profile, options.gamma);
  const double probe = options.probe_fraction * profile.grid().half_width();
  r.ff_dev_left = std::abs(profile(-probe) - profile.far_field().left);
  r.ff_dev_right = std::abs(profile(probe) - profile.far_field().right);
  return r;
}

double l2_norm_squared(const InterfaceProfile& profile) {
  require_decaying(profile);
  std::vector<double> sq(profile.samples().begin(), profile.samples().end());
  for (double& v : sq) v *= v;
  return numerics::trapezoid(sq, profile.grid().spacing());
}

double energy_dissipation(const InterfaceProfile& profile) {
  require_decaying(profile);
  const int n = profile.size();
  const double h = profile.grid().spacing();
  const auto f = profile.samples();
  const auto d1 = slopes(profile);
  std::vector<double> row(static_cast<std::size_t>(n));
  parallel_for(n, [&](int begin, int end) {
    std::vector<double> terms(static_cast<std::size_t>(n + 2));
    for (int i = begin; i < end; ++i) {
      std::size_t m = 0;
      for (int k = 0; k < n; ++k) {
        if (k == i) {
          terms[m++] = std::log1p(d1[static_cast<std::size_t>(i)] * d1[static_cast<std::size_t>(i)]);
          continue;
        }
        const double q = (f[static_cast<std::size_t>(i)] - f[static_cast<std::size_t>(k)]) / ((i - k) * h);
        terms[m++] = std::log1p(q * q);
      }
      const double c = f[static_cast<std::size_t>(i)];
      // Source off the grid (value 0) on both sides; doubled for the mirror
      // region where x is off the grid and the source is on it.
      const double tail = log_tail(c, (i + 0.5) * h) + log_tail(c, (n - 1 - i + 0.5) * h);
      terms[m++] = 2.0 * tail / h;
      row[static_cast<std::size_t>(i)] = h * h * pairwise_sum(std::span(terms.data(), m));
    }
  });
  return pairwise_sum(row);
}

std::vector<double> energy_identity_residual(const Trajectory& trajectory, const PhysicsParams& physics) {
  std::vector<double> res;
  if (trajectory.empty()) return res;
  const auto& entries = trajectory.entries();
  const double e0 = l2_norm_squared(entries.front().profile);
  double integral = 0.0;
  double d_prev = energy_dissipation(entries.front().profile);
  res.push_back(0.0);
  for (std::size_t n = 1; n < entries.size(); ++n) {
    const double d = energy_dissipation(entries[n].profile);
    integral += 0.5 * (entries[n].time - entries[n - 1].time) * (d + d_prev);
    d_prev = d;
    res.push_back(l2_norm_squared(entries[n].profile) + physics.density_coefficient * integral - e0);
  }
  return res;
}

TestFunction default_test_function(double half_width, double final_time) {
  const double r = 0.35 * half_width;
  const double c = 0.1 * half_width;
  const double tau = 0.45 * final_time;
  auto psi = [r, c](double x) {
    const double z = (x - c) / r;
    return std::abs(z) < 1.0 ? std::exp(-1.0 / (1.0 - z * z)) : 0.0;
  };
  auto dpsi = [r, c, psi](double x) {
    const double z = (x - c) / r;
    if (std::abs(z) >= 1.0) return 0.0;
    const double q = 1.0 - z * z;
    return psi(x) * (-2.0 * z / (q * q)) / r;
  };
  auto chi = [tau](double t) { return 1.0 - smoothstep(t / tau); };
  auto dchi = [tau](double t) {
    const double u = t / tau;
    if (u <= 0.0 || u >= 1.0) return 0.0;
    // smoothstep = e0/(e0+e1) with e0 = e^{-1/u}, e1 = e^{-1/(1-u)}
    const double e0 = std::exp(-1.0 / u), e1 = std::exp(-1.0 / (1.0 - u));
    const double de0 = e0 / (u * u), de1 = -e1 / ((1.0 - u) * (1.0 - u));
    const double ds = (de0 * (e0 + e1) - e0 * (de0 + de1)) / ((e0 + e1) * (e0 + e1));
    return -ds / tau;
  };
  TestFunction tf;
  tf.value = [psi, chi](double x, double t) { return psi(x) * chi(t); };
  tf.dt = [psi, dchi](double x, double t) { return psi(x) * dchi(t); };
  tf.dx = [dpsi, chi](double x, double t) { return dpsi(x) * chi(t); };
  tf.x_min = c - r;
  tf.x_max = c + r;
  tf.t_max = tau;
  return tf;
}

double weak_form_residual(const Trajectory& trajectory, const PhysicsParams& physics, const TestFunction& phi) {
  if (trajectory.empty()) throw Error("empty trajectory");
  const auto& entries = trajectory.entries();
  const InterfaceProfile& first = entries.front().profile;
  if (first.far_field().tilt != 0.0) throw Error("weak form is checked on untilted trajectories");
  const Grid& grid = first.grid();
  const double L = grid.half_width();
  const double t0 = entries.front().time;
  if (!(phi.x_min > -L && phi.x_max < L)) throw Error("test function support must lie inside (-L, L)");
  if (!(phi.t_max <= entries.back().time - t0)) throw Error("test function support must end before the final time");
  const double h = grid.spacing();
  const int n = grid.size();
  std::vector<int> nodes;
  for (int i = 0; i < n; ++i) {
    const double x = grid.node(i);
    if (x > phi.x_min && x < phi.x_max) nodes.push_back(i);
  }
  // Space integrals at each snapshot, then trapezoid in time.
  std::vector<double> time_rows, flux_rows;
  std::vector<double> times;
  for (const auto& e : entries) {
    const double t = e.time - t0;
    if (t > phi.t_max && !times.empty() && times.back() >= phi.t_max) break;
    std::vector<double> a(nodes.size()), b(nodes.size());
    parallel_for(static_cast<int>(nodes.size()), [&](int begin, int end) {
      for (int m = begin; m < end; ++m) {
        const int i = nodes[static_cast<std::size_t>(m)];
        const double x = grid.node(i);
        a[static_cast<std::size_t>(m)] = e.profile.at(i) * phi.dt(x, t);
        const double dx = phi.dx(x, t);
        b[static_cast<std::size_t>(m)] = dx == 0.0 ? 0.0 : ops::arctan_flux(e.profile, i) * dx;
      }
    });
    time_rows.push_back(h * pairwise_sum(a));
    flux_rows.push_back(h * pairwise_sum(b));
    times.push_back(t);
  }
  double i_time = 0.0, i_flux = 0.0;
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double dt = times[k] - times[k - 1];
    i_time += 0.5 * dt * (time_rows[k] + time_rows[k - 1]);
    i_flux += 0.5 * dt * (flux_rows[k] + flux_rows[k - 1]);
  }
  std::vector<double> init(nodes.size());
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    init[m] = first.at(nodes[m]) * phi.value(grid.node(nodes[m]), 0.0);
  }
  return i_time + h * pairwise_sum(init) - physics.density_coefficient * i_flux;
}

DispersionFit dispersion_fit(const Trajectory& trajectory, double wavenumber, double plateau_fraction) {
  if (trajectory.size() < 2) throw Error("dispersion fit needs at least two snapshots");
  DispersionFit fit;
  for (const auto& e : trajectory.entries()) {
    const Grid& g = e.profile.grid();
    const double lim = plateau_fraction * g.half_width();
    // Normal equations for f ≈ c1 sin(kx) + c2 cos(kx).
    double ss = 0.0, sc = 0.0, cc = 0.0, fs = 0.0, fc = 0.0;
    for (int i = 0; i < g.size(); ++i) {
      const double x = g.node(i);
      if (std::abs(x) > lim) continue;
      const double s = std::sin(wavenumber * x), c = std::cos(wavenumber * x), f = e.profile.at(i);
      ss += s * s;
      sc += s * c;
      cc += c * c;
      fs += f * s;
      fc += f * c;
    }
    const double det = ss * cc - sc * sc;
    const double c1 = (fs * cc - fc * sc) / det;
    const double c2 = (fc * ss - fs * sc) / det;
    const double amp = std::hypot(c1, c2);
    if (!(amp >= 1e-14)) throw Error("mode amplitude below the noise floor");
    fit.times.push_back(e.time);
    fit.amplitudes.push_back(amp);
  }
  const double m = static_cast<double>(fit.times.size());
  double st = 0.0, sy = 0.0;
  for (std::size_t k = 0; k < fit.times.size(); ++k) {
    st += fit.times[k];
    sy += std::log(fit.amplitudes[k]);
  }
  const double tbar = st / m, ybar = sy / m;
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < fit.times.size(); ++k) {
    num += (fit.times[k] - tbar) * (std::log(fit.amplitudes[k]) - ybar);
    den += (fit.times[k] - tbar) * (fit.times[k] - tbar);
  }
  fit.rate = num / den;
  return fit;
}

MonotonicityVerdict monotonicity_guard(const Trajectory& trajectory, double tol) {
  MonotonicityVerdict v;
  if (trajectory.empty()) return v;
  const auto& first = trajectory.front().profile;
  const double sup0 = sup_norm(first);
  const double beta = first.far_field().tilt;
  const double b = std::min(first.far_field().left, first.far_field().right);
  double slope_min0 = 0.0;
  v.slope_max = -INFINITY;
  v.slope_min = INFINITY;
  v.sup_drift = -INFINITY;
  v.min_value_drop = -INFINITY;
  for (std::size_t n = 0; n < trajectory.size(); ++n) {
    const auto& p = trajectory.entries()[n].profile;
    const auto d1 = slopes(p);
    const double mx = *std::max_element(d1.begin(), d1.end());
    const double mn = *std::min_element(d1.begin(), d1.end());
    if (n == 0) slope_min0 = mn;
    v.slope_max = std::max(v.slope_max, mx);
    v.slope_min = std::min(v.slope_min, mn);
    v.sup_drift = std::max(v.sup_drift, sup_norm(p) - sup0);
    const auto s = p.samples();
    v.min_value_drop = std::max(v.min_value_drop, b - *std::min_element(s.begin(), s.end()));
    v.lap_max = std::max(v.lap_max, lap_number(p));
  }
  v.slope_min_drop = slope_min0 - v.slope_min;
  v.full_slope_max = beta + v.slope_max;
  v.pass = v.slope_max <= tol && v.sup_drift <= tol && v.min_value_drop <= tol && v.lap_max == 0 &&
           v.slope_min_drop <= tol;
  v.tilted_pass = beta < 0.0 && v.full_slope_max <= 0.5 * beta + tol;
  return v;
}

}  // namespace muskat
