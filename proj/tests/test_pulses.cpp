#include "fockpulse/error.hpp"
#include "fockpulse/objective.hpp"
#include "fockpulse/pulses.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace fockpulse;

namespace {

CompositePulse sample_pulse() {
  return CompositePulse{{{1.0, 0.1, 0.0, 250.0}, {0.9, 0.12, 1.3, 410.0}, {1.1, 0.08, 4.0, 90.0}}};
}

}  // namespace

TEST_CASE("composite unitary equals the product of directly built propagators") {
  SystemConfig c;
  c.cutoff = 5;
  const auto cp = sample_pulse();
  OperatorMatrix direct = OperatorMatrix::Identity(10, 10);
  for (const auto& p : cp.pulses) direct = propagate(build_hamiltonian(c, p), p.t) * direct;
  const auto u = composite_unitary(c, cp);
  CHECK((u - direct).cwiseAbs().maxCoeff() < 1e-11);
  CHECK(max_unitarity_defect(u) <= 1e-10);
}

TEST_CASE("composition associativity") {
  SystemConfig c;
  const auto cp = sample_pulse();
  CompositePulse head{{cp.pulses[0], cp.pulses[1]}};
  CompositePulse tail{{cp.pulses[2]}};
  const OperatorMatrix split = composite_unitary(c, tail) * composite_unitary(c, head);
  CHECK((composite_unitary(c, cp) - split).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ground columns are the left block of the unitary") {
  SystemConfig c;
  c.cutoff = 6;
  const UnitaryEvaluator ev(c);
  const auto cp = sample_pulse();
  const auto u = ev.unitary(cp);
  CHECK((ev.ground_columns(cp) - u.leftCols(6)).cwiseAbs().maxCoeff() < 1e-13);
  // repeated evaluation through the cache is bitwise stable
  CHECK(ev.unitary(cp) == u);
}

TEST_CASE("global phase leaves the modulus matrix unchanged") {
  SystemConfig c;
  const auto u = composite_unitary(c, sample_pulse());
  const OperatorMatrix rotated = std::polar(1.0, 0.77) * u;
  CHECK((modulus_matrix(rotated) - modulus_matrix(u)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("analytic swap parameters") {
  const auto cp = analytic_swap_parameters(SystemConfig{}, 0.1);
  REQUIRE(cp.size() == 3);
  CHECK(cp.pulses[0].t == doctest::Approx(264.46).epsilon(0.01 / 264.46));
  CHECK(cp.pulses[1].t == doctest::Approx(528.91).epsilon(0.01 / 528.91));
  CHECK(cp.pulses[2].t == cp.pulses[0].t);
  CHECK(cp.pulses[1].phi == doctest::Approx(0.95).epsilon(0.01 / 0.95));
  CHECK(cp.pulses[0].phi == 0.0);
  for (const auto& p : cp.pulses) CHECK(p.delta == 1.0);
  CHECK_THROWS_AS(analytic_swap_parameters(SystemConfig{}, 0.0), Error);
}

TEST_CASE("analytic swap sanity at large cutoff") {
  SystemConfig c;
  c.cutoff = 8;
  const auto u = composite_unitary(c, analytic_swap_parameters(c, 0.1));
  const double g0_e1 = std::abs(u(c.cutoff + 1, 0));
  CHECK(g0_e1 >= 0.79);
  CHECK(g0_e1 <= 0.82);
}

TEST_CASE("invalid pulses are rejected") {
  SystemConfig c;
  CHECK_THROWS_AS(composite_unitary(c, CompositePulse{}), Error);
  CHECK_THROWS_AS(composite_unitary(c, CompositePulse{{{1.0, 0.1, 0.0, -1.0}}}), Error);
  CHECK_THROWS_AS(composite_unitary(c, CompositePulse{{{1.0, 0.1, NAN, 1.0}}}), Error);
}

TEST_CASE("phase canonicalisation") {
  CHECK(canonical_phase(-0.5) == doctest::Approx(2 * std::numbers::pi - 0.5));
  CHECK(canonical_phase(7.0) == doctest::Approx(7.0 - 2 * std::numbers::pi));
  for (double phi : {0.0, 1.0, 6.2}) CHECK(canonical_phase(phi) == phi);
  const double x = canonical_phase(-1e-18);
  CHECK(x >= 0.0);
  CHECK(x < 2 * std::numbers::pi);
}

TEST_CASE("layout pack and unpack") {
  SystemConfig c;
  const auto weak = weak_coupling_layout(c, 3, 0.1);
  CHECK(weak.size() == 5);
  const auto tmpl = uniform_template(c, 3, 0.1, 1.0);
  CHECK(pack(tmpl, weak).size() == 5);
  CHECK(weak.entries[0].upper == doctest::Approx(4 * std::numbers::pi / (0.084 * 0.1)));
  CHECK(weak.entries[0].lower == 0.0);

  const auto strong = strong_coupling_layout(c, 3, 1.0);
  CHECK(strong.size() == 6);
  std::vector<double> v = pack(tmpl, strong);
  v.back() = 0.93;
  const auto out = unpack(v, tmpl, strong);
  for (const auto& p : out.pulses) CHECK(p.delta == 0.93);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(strong.size());
  for (auto& xi : x) xi = u(rng);
  CHECK(pack(unpack(x, tmpl, strong), strong) == x);

  CHECK_THROWS_AS(unpack(std::vector<double>(4), tmpl, strong), Error);
  ParamLayout bad;
  bad.entries.push_back({{{5, PulseField::t}}, 0.0, 1.0});
  CHECK_THROWS_AS(bad.validate(3), Error);
  CHECK_THROWS_AS(ParamLayout{}.validate(3), Error);
  ParamLayout inverted;
  inverted.entries.push_back({{{0, PulseField::t}}, 2.0, 1.0});
  CHECK_THROWS_AS(inverted.validate(3), Error);
}

TEST_CASE("pulse field names round trip") {
  for (auto f : {PulseField::delta, PulseField::omega, PulseField::phi, PulseField::t}) {
    CHECK(pulse_field_from_string(to_string(f)) == f);
  }
  CHECK_THROWS_AS(pulse_field_from_string("amplitude"), Error);
}
