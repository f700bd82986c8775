#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "muskat/scenarios.hpp"

using namespace muskat;

TEST_CASE("scenario kind names round-trip") {
  for (auto k : {ScenarioKind::constant, ScenarioKind::tanh_step, ScenarioKind::smoothed_ramp, ScenarioKind::bump,
                 ScenarioKind::windowed_sine, ScenarioKind::tilted}) {
    CHECK(scenario_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(scenario_kind_from_string("sawtooth"), Error);
}

TEST_CASE("smoothstep and window") {
  CHECK(smoothstep(-1.0) == 0.0);
  CHECK(smoothstep(0.0) == 0.0);
  CHECK(smoothstep(1.0) == 1.0);
  CHECK(smoothstep(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  // Odd symmetry about 1/2.
  for (double t : {0.1, 0.3, 0.45}) CHECK(smoothstep(t) + smoothstep(1.0 - t) == doctest::Approx(1.0));
  double prev = 0.0;
  for (int i = 1; i < 100; ++i) {
    const double v = smoothstep(i / 100.0);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(smooth_window(0.3, 1.0, 2.0) == 1.0);
  CHECK(smooth_window(-2.5, 1.0, 2.0) == 0.0);
  CHECK(smooth_window(1.5, 1.0, 2.0) == doctest::Approx(0.5));
}

TEST_CASE("tanh step samples") {
  ScenarioSpec spec;
  spec.points = 512;
  spec.steepness = 2.0;
  spec.center = 0.5;
  const auto p = make_profile(spec);
  CHECK(p.far_field() == FarField{1.0, -1.0, 0.0});
  for (int i = 0; i < p.size(); i += 37) {
    const double x = p.grid().node(i);
    CHECK(p.at(i) == doctest::Approx(std::tanh(-2.0 * (x - 0.5))).epsilon(1e-14));
  }
  spec.left = 3.0;
  spec.right = 1.0;
  const auto q = make_profile(spec);
  CHECK(q.at(q.size() / 2 + 64) == doctest::Approx(2.0 + std::tanh(-2.0 * (q.grid().node(q.size() / 2 + 64) - 0.5))));
}

TEST_CASE("tilted, ramp, bump and windowed sine") {
  ScenarioSpec spec;
  spec.points = 256;
  spec.kind = ScenarioKind::tilted;
  spec.tilt = -0.25;
  CHECK(make_profile(spec).far_field().tilt == -0.25);

  spec.kind = ScenarioKind::smoothed_ramp;
  spec.width = 2.0;
  const auto ramp = make_profile(spec);
  CHECK(ramp(-2.5) == 1.0);
  CHECK(ramp(2.5) == -1.0);
  CHECK(ramp(0.0) == doctest::Approx(0.0).epsilon(1e-12));

  spec.kind = ScenarioKind::bump;
  spec.amplitude = 0.5;
  spec.width = 2.0;
  const auto bump = make_profile(spec);
  CHECK(bump.far_field().decaying());
  CHECK(bump(0.0) == doctest::Approx(0.5));
  CHECK(bump(2.5) == doctest::Approx(0.5 * std::exp(-1.5625)));  // node 136

  spec.kind = ScenarioKind::windowed_sine;
  spec.amplitude = 1e-3;
  spec.wavenumber = 3;
  const auto ws = make_profile(spec);
  for (int i = 0; i < ws.size(); ++i) {
    const double x = ws.grid().node(i);
    if (std::abs(x) <= 20.0) CHECK(ws.at(i) == doctest::Approx(1e-3 * std::sin(3.0 * x)).epsilon(1e-13));
    if (std::abs(x) >= 32.0) CHECK(ws.at(i) == 0.0);
  }
}

TEST_CASE("scenario validation") {
  ScenarioSpec spec;
  spec.left = -1.0;
  spec.right = 1.0;
  try {
    spec.validate();
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("a must exceed b") != std::string::npos);
  }
  ScenarioSpec odd;
  odd.points = 101;
  CHECK_THROWS_AS(odd.validate(), Error);
  ScenarioSpec flat;
  flat.kind = ScenarioKind::constant;
  CHECK_THROWS_AS(flat.validate(), Error);
  flat.left = flat.right = 0.7;
  CHECK_NOTHROW(flat.validate());
  ScenarioSpec up;
  up.kind = ScenarioKind::tilted;
  up.tilt = 0.1;
  CHECK_THROWS_AS(up.validate(), Error);
  ScenarioSpec w;
  w.kind = ScenarioKind::windowed_sine;
  w.wavenumber = 0;
  CHECK_THROWS_AS(w.validate(), Error);
}

TEST_CASE("profiles that have not settled are rejected") {
  ScenarioSpec spec;
  spec.half_width = 5.0;
  spec.points = 128;
  CHECK_THROWS_AS(make_profile(spec), Error);
  spec.half_width = 20.0;
  CHECK_NOTHROW(make_profile(spec));
}

TEST_CASE("mollifier") {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::bump;
  spec.points = 1024;
  spec.half_width = 20.0;
  const auto p = make_profile(spec);
  CHECK(mollify(p, 0.5 * p.grid().spacing()).samples()[300] == p.samples()[300]);

  const auto m = mollify(p, 0.5);
  const double h = p.grid().spacing();
  double mass0 = 0.0, mass1 = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    mass0 += h * p.at(i);
    mass1 += h * m.at(i);
  }
  CHECK(mass1 == doctest::Approx(mass0).epsilon(1e-12));
  CHECK(m(0.0) < p(0.0));

  // A symmetric unit-mass kernel reproduces affine data away from the edges.
  const Grid g(20.0, 512);
  std::vector<double> line(512);
  for (int i = 0; i < 512; ++i) line[i] = 0.3 * g.node(i) + 1.0;
  const InterfaceProfile lp(g, line, FarField{-5.0, 7.0, 0.0});
  const auto lm = mollify(lp, 1.0);
  for (int i = 100; i < 412; i += 17) CHECK(lm.at(i) == doctest::Approx(line[i]).epsilon(1e-12));

  spec.mollifier_width = 0.5;
  CHECK(make_profile(spec).samples()[512] == doctest::Approx(m.samples()[512]).epsilon(1e-14));
}

TEST_CASE("Rayleigh-Taylor unstable configuration") {
  const auto cfg = rt_unstable_config(2, 1e-5, 0.1);
  CHECK(cfg.physics.density_coefficient == -1.0);
  CHECK_FALSE(cfg.physics.stable());
  CHECK(cfg.growth_rate == doctest::Approx(2.0 * M_PI));
  CHECK(cfg.spec.kind == ScenarioKind::windowed_sine);
  CHECK(cfg.t_max == 0.1);
  const auto zero = rt_unstable_config(2, 0.0, 0.1);
  const auto p = make_profile(zero.spec);
  for (double v : p.samples()) CHECK(v == 0.0);
}
