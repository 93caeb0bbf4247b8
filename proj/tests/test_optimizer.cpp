#include "oracles.hpp"

#include "fockpulse/error.hpp"
#include "fockpulse/optimizer.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>

using namespace fockpulse;

namespace {

double sphere(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - 0.3 * (i + 1)) * (x[i] - 0.3 * (i + 1));
  return s;
}

PsoConfig small_pso(std::uint64_t seed, int threads = 1) {
  PsoConfig p;
  p.particles = 16;
  p.iterations = 40;
  p.seed = seed;
  p.threads = threads;
  return p;
}

}  // namespace

TEST_CASE("box validation") {
  CHECK_THROWS_AS(Box{}.validate(), Error);
  CHECK_THROWS_AS((Box{{0.0, 1.0}, {1.0}}.validate()), Error);
  CHECK_THROWS_AS((Box{{2.0}, {1.0}}.validate()), Error);
  const Box b{{0.0, -1.0}, {1.0, 1.0}};
  const std::vector<double> in{0.5, 0.0};
  const std::vector<double> out{1.5, 0.0};
  CHECK(b.contains(in));
  CHECK_FALSE(b.contains(out));
}

TEST_CASE("pso finds the minimum of a sphere and respects bounds") {
  const Box box{{-2.0, -2.0, -2.0}, {2.0, 2.0, 0.5}};
  PsoConfig cfg;
  cfg.particles = 32;
  cfg.iterations = 200;
  const auto r = pso_minimize(sphere, box, cfg);
  CHECK(box.contains(r.x));
  CHECK(r.x[0] == doctest::Approx(0.3).epsilon(1e-3));
  CHECK(r.x[2] == doctest::Approx(0.5));  // constrained optimum on the face
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    CHECK(r.history[i].loss <= r.history[i - 1].loss);
  }
}

TEST_CASE("pso is bitwise reproducible and independent of the worker count") {
  const Box box{{-1.0, -1.0}, {1.0, 1.0}};
  const auto a = pso_minimize(sphere, box, small_pso(9, 1));
  const auto b = pso_minimize(sphere, box, small_pso(9, 1));
  const auto c = pso_minimize(sphere, box, small_pso(9, 3));
  CHECK(a.x == b.x);
  CHECK(a.loss == b.loss);
  CHECK(a.x == c.x);
  REQUIRE(a.history.size() == c.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) CHECK(a.history[i].loss == c.history[i].loss);
  const auto d = pso_minimize(sphere, box, small_pso(10, 1));
  CHECK(d.x != a.x);
}

TEST_CASE("refine converges on a smooth bowl") {
  const Box box{{-5.0, -5.0}, {5.0, 5.0}};
  const auto r = refine_minimize(sphere, box, {4.0, -4.0}, RefineConfig{});
  CHECK(r.loss < 1e-10);
  CHECK(r.x[0] == doctest::Approx(0.3).epsilon(1e-5));
  CHECK(r.x[1] == doctest::Approx(0.6).epsilon(1e-5));
}

TEST_CASE("refine stays inside the box") {
  const Box box{{1.0, 1.0}, {2.0, 2.0}};
  const auto r = refine_minimize(sphere, box, {1.7, 1.9}, RefineConfig{});
  CHECK(box.contains(r.x));
  CHECK(r.x[0] == doctest::Approx(1.0));
  CHECK(r.x[1] == doctest::Approx(1.0));
  CHECK_THROWS_AS(refine_minimize(sphere, box, {3.0, 1.0}, RefineConfig{}), Error);
}

TEST_CASE("finite-difference gradient of the pulse loss agrees with a 5-point stencil") {
  SystemConfig c;
  const auto layout = weak_coupling_layout(c, 3, 0.1);
  const auto tmpl = uniform_template(c, 3, 0.1, 1.0);
  const auto spec = swap_target(c, 0);
  const auto f = pulse_objective(c, tmpl, layout, spec);
  const Box box{layout.lower_bounds(), layout.upper_bounds()};
  const std::vector<double> x{254.0, 610.0, 180.0, 1.0, 1.4};
  const auto g = finite_difference_gradient(f, x, f(x), box, 1e-6);
  const auto ref = oracle::gradient5([&](const std::vector<double>& y) { return f(y); }, x, 1e-3);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double scale = std::max(std::abs(ref[i]), 1e-3);
    CHECK(std::abs(g[i] - ref[i]) / scale <= 1e-4);
  }
}

TEST_CASE("gradient is one-sided at the box faces") {
  const Box box{{0.0}, {1.0}};
  auto f = [](std::span<const double> x) { return x[0] * x[0]; };
  const std::vector<double> lo{0.0};
  const std::vector<double> hi{1.0};
  CHECK(finite_difference_gradient(f, lo, 0.0, box, 1e-6)[0] == doctest::Approx(0.0).epsilon(1e-5));
  CHECK(finite_difference_gradient(f, hi, 1.0, box, 1e-6)[0] == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("non-finite gradients name the coordinate") {
  const Box box{{-1.0, -1.0}, {1.0, 1.0}};
  auto f = [](std::span<const double> x) {
    return x[1] > 0.25 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
  };
  const std::vector<double> x{0.0, 0.25};
  try {
    finite_difference_gradient(f, x, 0.0, box, 1e-6, {"t[1]", "phi[2]"});
    FAIL("expected a numerical error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::numerical);
    CHECK(std::string(e.what()).find("phi[2]") != std::string::npos);
  }
}

TEST_CASE("pulse objective matches the loss of the full unitary") {
  SystemConfig c;
  const auto layout = strong_coupling_layout(c, 3, 1.0);
  const auto tmpl = uniform_template(c, 3, 1.0, 1.0);
  const std::vector<double> x{30.0, 50.0, 70.0, 0.4, 2.0, 0.8};
  for (const auto& spec : {shelving_target(c, 1), swap_target(c, 0)}) {
    const auto f = pulse_objective(c, tmpl, layout, spec);
    const double direct = modulus_loss(composite_unitary(c, unpack(x, tmpl, layout)), spec);
    CHECK(f(x) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("layout names") {
  SystemConfig c;
  const auto names = layout_names(strong_coupling_layout(c, 2, 1.0));
  REQUIRE(names.size() == 4);
  CHECK(names[0] == "t[1]");
  CHECK(names[2] == "phi[2]");
  CHECK(names[3].find("delta[1]") != std::string::npos);
}

TEST_CASE("design pipeline is deterministic and improves on the swarm") {
  SystemConfig c;
  c.cutoff = 3;
  const auto layout = weak_coupling_layout(c, 3, 0.1);
  const auto tmpl = uniform_template(c, 3, 0.1, 1.0);
  const auto spec = swap_target(c, 0);
  DesignConfig d;
  d.pso = small_pso(4);
  d.refine.max_iters = 40;
  d.starts = 2;
  d.refined = 1;
  const auto a = design_pulse(c, tmpl, layout, spec, d);
  const auto b = design_pulse(c, tmpl, layout, spec, d);
  CHECK(a.best == b.best);
  CHECK(a.loss == b.loss);
  const auto swarm = pso_search(c, tmpl, layout, spec, d.pso);
  CHECK(a.loss <= swarm.loss);
  const Box box{layout.lower_bounds(), layout.upper_bounds()};
  CHECK(box.contains(pack(a.best, layout)));
  for (std::size_t i = 1; i < a.history.size(); ++i) {
    CHECK(a.history[i].loss <= a.history[i - 1].loss);
  }
  CHECK(a.loss == doctest::Approx(modulus_loss(composite_unitary(c, a.best), spec)).epsilon(1e-12));
}

TEST_CASE("optimizer config validation") {
  PsoConfig p;
  p.particles = 0;
  CHECK_THROWS_AS(p.validate(), Error);
  RefineConfig r;
  r.gradient_step = 0.0;
  CHECK_THROWS_AS(r.validate(), Error);
  DesignConfig d;
  d.refined = 5;
  CHECK_THROWS_AS(d.validate(), Error);
}

TEST_CASE("progress events are emitted") {
  const Box box{{-1.0}, {1.0}};
  int pso_events = 0;
  const auto r = pso_minimize(
      sphere, box, small_pso(1),
      [&](const ProgressEvent& e) {
        if (std::string(e.stage) == "pso") ++pso_events;
      });
  CHECK(pso_events > 0);
  CHECK(r.evaluations > 0);
}
