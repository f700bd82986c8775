#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>

#include "muskat/diagnostics.hpp"

using namespace muskat;

namespace {

InterfaceProfile sampled(const Grid& g, const std::function<double(double)>& fn, FarField ff = {}, double t = 0.0) {
  std::vector<double> f(g.size());
  for (int i = 0; i < g.size(); ++i) f[i] = fn(g.node(i));
  return InterfaceProfile(g, f, ff, t);
}

double gauss(double x) { return std::exp(-x * x); }

}  // namespace

TEST_CASE("lap number counts sign changes of the slope") {
  const Grid g(20.0, 1024);
  CHECK(lap_number(sampled(g, [](double x) { return std::tanh(-x); }, FarField{1.0, -1.0, 0.0})) == 0);
  CHECK(lap_number(sampled(g, gauss)) == 1);
  CHECK(lap_number(sampled(g, [](double x) { return gauss(x - 4.0) + gauss(x + 4.0); })) == 3);
  // Flat stretches carry no sign.
  CHECK(lap_number(sampled(g, [](double) { return 0.0; })) == 0);
  CHECK(lap_slope_floor(sampled(g, gauss)) == 1e-7);
}

TEST_CASE("norms") {
  const Grid g(20.0, 1024);
  const auto p = sampled(g, [](double x) { return 0.3 * gauss(x); });
  CHECK(l2_norm_squared(p) == doctest::Approx(0.09 * std::sqrt(M_PI / 2.0)).epsilon(1e-12));
  CHECK(sup_norm(p) == doctest::Approx(0.3));
  const auto q = sampled(g, [](double x) { return std::tanh(-x); }, FarField{1.0, -2.0, 0.0});
  CHECK(sup_norm(q) == 2.0);
  CHECK_THROWS_AS(l2_norm_squared(q), Error);
}

TEST_CASE("energy dissipation reduces to the H^1/2 seminorm for small data") {
  // ln(1 + q^2) ~ q^2 and ∫∫ ((f(x)-f(y))/(x-y))^2 = ∫ |ξ| |f^(ξ)|^2 dξ = 2π δ^2
  // for f = δ exp(-x^2).
  const double delta = 1e-3;
  const Grid g(20.0, 1024);
  const auto p = sampled(g, [&](double x) { return delta * gauss(x); });
  CHECK(energy_dissipation(p) == doctest::Approx(2.0 * M_PI * delta * delta).epsilon(1e-3));
  CHECK(energy_dissipation(sampled(g, [](double) { return 0.0; })) == 0.0);
}

TEST_CASE("Hölder seminorm of the second derivative") {
  const Grid g(10.0, 512);
  const auto quad = sampled(g, [](double x) { return 0.5 * x * x; }, FarField{50.0, 50.0, 0.0});
  CHECK(holder_seminorm_d2(quad, 0.25) < 1e-8);
  const auto p = sampled(g, gauss);
  const double s = holder_seminorm_d2(p, 0.25);
  CHECK(s > 0.5);
  CHECK(s < 10.0);
  CHECK_THROWS_AS(holder_seminorm_d2(p, 0.6), Error);
}

TEST_CASE("record diagnostics on a tanh step") {
  const Grid g(40.0, 2048);
  const auto p = sampled(g, [](double x) { return std::tanh(-x); }, FarField{1.0, -1.0, 0.0}, 0.25);
  const auto r = record_diagnostics(p);
  CHECK(r.t == 0.25);
  CHECK(r.max_value == doctest::Approx(1.0));
  CHECK(r.min_value == doctest::Approx(-1.0));
  CHECK(r.slope_min == doctest::Approx(-1.0).epsilon(1e-5));
  CHECK(r.slope_max <= 1e-12);
  CHECK(r.lap_number == 0);
  // ∫ sech^4 = 4/3.
  CHECK(r.l2_dxf == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-5));
  CHECK_FALSE(r.energy_residual.has_value());
  CHECK(r.ff_dev_left < 1e-14);
  CHECK(r.ff_dev_right < 1e-14);
  DiagnosticsOptions bad;
  bad.probe_fraction = 1.5;
  CHECK_THROWS_AS(record_diagnostics(p, bad), Error);
}

TEST_CASE("dispersion fit recovers a synthetic decay rate") {
  const Grid g(40.0, 1024);
  const double rate = -2.7, k = 2.0;
  Trajectory traj("synthetic");
  for (int n = 0; n <= 10; ++n) {
    const double t = 0.03 * n;
    traj.append(sampled(
        g, [&](double x) { return 1e-4 * std::exp(rate * t) * std::sin(k * x + 0.3) * std::exp(-x * x / 2000.0); },
        FarField{}, t));
  }
  const auto fit = dispersion_fit(traj, k);
  CHECK(fit.rate == doctest::Approx(rate).epsilon(1e-9));
  CHECK(fit.times.size() == 11);
}

TEST_CASE("monotonicity guard") {
  const Grid g(20.0, 512);
  Trajectory good("synthetic");
  for (int n = 0; n < 4; ++n) {
    const double s = 1.0 / (1.0 + n);
    good.append(sampled(g, [&](double x) { return std::tanh(-s * x); }, FarField{1.0, -1.0, 0.0}, n * 0.1));
  }
  auto v = monotonicity_guard(good, 1e-6);
  CHECK(v.pass);
  CHECK(v.lap_max == 0);
  CHECK(v.slope_min_drop <= 0.0);

  Trajectory bad("synthetic");
  bad.append(sampled(g, [](double x) { return std::tanh(-x); }, FarField{1.0, -1.0, 0.0}));
  bad.append(sampled(g, [](double x) { return std::tanh(-x) + 0.1 * gauss(x - 3.0); }, FarField{1.0, -1.0, 0.0}, 0.1));
  v = monotonicity_guard(bad, 1e-6);
  CHECK_FALSE(v.pass);
  CHECK(v.slope_max > 0.01);
  CHECK(v.lap_max == 2);

  Trajectory tilted("synthetic");
  tilted.append(sampled(g, [](double x) { return std::tanh(-x); }, FarField{1.0, -1.0, -0.25}));
  v = monotonicity_guard(tilted, 1e-6);
  CHECK(v.full_slope_max == doctest::Approx(-0.25).epsilon(1e-9));
  CHECK(v.tilted_pass);
}

TEST_CASE("default test function") {
  const auto tf = default_test_function(40.0, 0.5);
  CHECK(tf.value(4.0, 0.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(tf.value(4.0, 0.3) == 0.0);
  CHECK(tf.value(-11.0, 0.0) == 0.0);
  CHECK(tf.value(19.0, 0.0) == 0.0);
  CHECK(tf.x_min == doctest::Approx(-10.0));
  CHECK(tf.x_max == doctest::Approx(18.0));
  const double x = 7.3, t = 0.1, e = 1e-6;
  CHECK(tf.dx(x, t) == doctest::Approx((tf.value(x + e, t) - tf.value(x - e, t)) / (2 * e)).epsilon(1e-6));
  CHECK(tf.dt(x, t) == doctest::Approx((tf.value(x, t + e) - tf.value(x, t - e)) / (2 * e)).epsilon(1e-6));
}

TEST_CASE("weak form and energy residuals vanish on trivial trajectories") {
  const Grid g(40.0, 256);
  Trajectory traj("synthetic");
  for (int n = 0; n <= 4; ++n) traj.append(sampled(g, [](double) { return 0.0; }, FarField{}, 0.1 * n));
  CHECK(weak_form_residual(traj, PhysicsParams{}, default_test_function(40.0, 0.4)) == 0.0);
  const auto res = energy_identity_residual(traj, PhysicsParams{});
  CHECK(res.size() == 5);
  for (double r : res) CHECK(r == 0.0);
}
