#include "fockpulse/error.hpp"
#include "fockpulse/objective.hpp"
#include "fockpulse/robustness.hpp"

#include <doctest.h>

#include <numbers>

using namespace fockpulse;

TEST_CASE("sweep spec validation and offsets") {
  SweepSpec s;
  s.points = 2;
  CHECK_THROWS_AS(s.validate(), Error);
  s.points = 3;
  s.lower = 0.1;
  CHECK_THROWS_AS(s.validate(), Error);
  s.lower = -1.0;
  s.upper = 1.0;
  const auto o = s.offsets();
  REQUIRE(o.size() == 3);
  CHECK(o[1] == 0.0);
  s.points = 40;  // no sample lands on 0 exactly without snapping
  bool has_zero = false;
  for (double x : s.offsets()) has_zero = has_zero || x == 0.0;
  CHECK(has_zero);
}

TEST_CASE("perturbation rules") {
  const CompositePulse cp{{{1.0, 0.1, 0.0, 10.0}, {1.0, 0.1, 1.0, 20.0}, {1.0, 0.1, 2.0, 30.0}}};
  SweepSpec phase;
  const auto p = perturbed(cp, phase, 0.5);
  CHECK(p.pulses[0].phi == 0.0);
  CHECK(p.pulses[1].phi == 1.5);
  CHECK(p.pulses[2].phi == 2.5);

  SweepSpec dur;
  dur.axis = SweepAxis::duration_offset;
  bool clamped = false;
  const auto d = perturbed(cp, dur, -15.0, &clamped);
  CHECK(clamped);
  CHECK(d.pulses[0].t == 0.0);
  CHECK(d.pulses[1].t == 5.0);

  dur.which = 2;
  const auto one = perturbed(cp, dur, 1.0, &clamped);
  CHECK_FALSE(clamped);
  CHECK(one.pulses[0].t == 10.0);
  CHECK(one.pulses[2].t == 31.0);
}

TEST_CASE("sweep at zero offset equals the direct evaluation") {
  SystemConfig c;
  const auto cp = analytic_swap_parameters(c, 0.1);
  SweepSpec s;
  s.points = 5;
  const Probe probe;
  const auto pts = sweep(c, cp, s, probe, 2);
  REQUIRE(pts.size() == 5);
  CHECK(pts[2].offset == 0.0);
  CHECK(pts[2].probability == probe_probability(c, cp, probe));
  for (const auto& p : pts) {
    CHECK(p.probability >= 0.0);
    CHECK(p.probability <= 1.0);
  }
  Probe excitation;
  excitation.target_fock.reset();
  const auto ex = sweep(c, cp, s, excitation);
  CHECK(ex[2].probability == doctest::Approx(excitation_profile(composite_unitary(c, cp))[0]));
}

TEST_CASE("sweep results do not depend on the worker count") {
  SystemConfig c;
  const auto cp = analytic_swap_parameters(c, 0.1);
  SweepSpec s;
  s.axis = SweepAxis::duration_offset;
  s.lower = -50;
  s.upper = 50;
  s.points = 9;
  const auto a = sweep(c, cp, s, Probe{}, 1);
  const auto b = sweep(c, cp, s, Probe{}, 4);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].probability == b[i].probability);
}

TEST_CASE("duration sweep shows non-monotonic ripple") {
  SystemConfig c;
  const auto cp = analytic_swap_parameters(c, 0.1);
  SweepSpec s;
  s.axis = SweepAxis::duration_offset;
  s.lower = -100;
  s.upper = 100;
  s.points = 101;
  const auto pts = sweep(c, cp, s, Probe{});
  int sign_changes = 0;
  double last = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double d = pts[i].probability - pts[i - 1].probability;
    if (std::abs(d) < 1e-4) continue;
    if (last != 0.0 && (d > 0) != (last > 0)) ++sign_changes;
    last = d;
  }
  CHECK(sign_changes >= 2);
}

TEST_CASE("widest window") {
  std::vector<SweepPoint> pts;
  const double probs[] = {0.5, 0.995, 0.999, 0.998, 0.992, 0.98, 0.999};
  for (int i = 0; i < 7; ++i) pts.push_back({-2.0 + i, probs[i], false});
  const auto w = widest_window(pts, 0.99);
  REQUIRE(w);
  CHECK(w->lower == -1.0);
  CHECK(w->upper == 2.0);
  pts[2].probability = 0.9;
  CHECK_FALSE(widest_window(pts, 0.99));
  CHECK_FALSE(widest_window({}, 0.99));
}

TEST_CASE("probe indices are checked") {
  SystemConfig c;
  const auto cp = analytic_swap_parameters(c, 0.1);
  CHECK_THROWS_AS(probe_probability(c, cp, Probe{7, 1}), Error);
  CHECK_THROWS_AS(probe_probability(c, cp, Probe{0, 9}), Error);
  SweepSpec s;
  s.which = 5;
  CHECK_THROWS_AS(sweep(c, cp, s, Probe{}), Error);
}
