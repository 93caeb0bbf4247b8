#include "oracles.hpp"

#include "fockpulse/error.hpp"
#include "fockpulse/fockspace.hpp"
#include "fockpulse/pulses.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace fockpulse;

namespace {

PulseParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {0.25 + 2.0 * u(rng), 0.05 + u(rng), 2 * std::numbers::pi * u(rng), 50 + 500 * u(rng)};
}

}  // namespace

TEST_CASE("system config validation") {
  CHECK_NOTHROW(SystemConfig{}.validate());
  SystemConfig c;
  c.cutoff = 1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = SystemConfig{};
  c.eta = -0.1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = SystemConfig{};
  c.fock_offset = -1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = SystemConfig{};
  c.cutoff = 12;
  c.fock_offset = 24;
  CHECK(c.max_fock() == 35);
  CHECK(c.contains_fock(24));
  CHECK_FALSE(c.contains_fock(36));
}

TEST_CASE("ladder operators") {
  SystemConfig c;
  c.cutoff = 5;
  const auto ops = ladder_operators(c);
  CHECK(ops.creation.rows() == 5);
  CHECK(std::abs(ops.annihilation(0, 1) - 1.0) < 1e-15);
  CHECK(std::abs(ops.annihilation(3, 4) - 2.0) < 1e-15);
  CHECK((ops.creation - ops.annihilation.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  // [a, a^dag] = 1 except in the last level
  const OperatorMatrix comm =
      ops.annihilation * ops.creation - ops.creation * ops.annihilation;
  for (int k = 0; k < 4; ++k) CHECK(std::abs(comm(k, k) - 1.0) < 1e-12);
  CHECK(std::abs(comm(4, 4) + 4.0) < 1e-12);

  c.fock_offset = 24;
  const auto shifted = ladder_operators(c);
  CHECK(std::abs(shifted.annihilation(0, 1) - std::sqrt(25.0)) < 1e-14);
}

TEST_CASE("displacement matches the Laguerre closed form away from the edge") {
  SystemConfig c;
  c.cutoff = 40;
  for (int sign : {1, -1}) {
    const auto d = displacement_exponential(c, sign);
    double worst = 0.0;
    for (int m = 0; m < 25; ++m) {
      for (int n = 0; n < 25; ++n) {
        worst = std::max(worst, std::abs(d(m, n) - oracle::displacement_element(c.eta, -sign, m, n)));
      }
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("shifted displacement matches the interior of a large window") {
  SystemConfig big;
  big.cutoff = 60;
  SystemConfig shifted;
  shifted.cutoff = 30;
  shifted.fock_offset = 15;
  const auto d_big = displacement_exponential(big, 1);
  const auto d_shift = displacement_exponential(shifted, 1);
  double worst = 0.0;
  for (int m = 8; m < 22; ++m) {
    for (int n = 8; n < 22; ++n) {
      worst = std::max(worst, std::abs(d_shift(m, n) - d_big(m + 15, n + 15)));
    }
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("hamiltonian is hermitian with the documented structure") {
  SystemConfig c;
  c.cutoff = 6;
  const PulseParams p{0.8, 0.3, 1.1, 0.0};
  const auto h = build_hamiltonian(c, p);
  CHECK(max_hermitian_defect(h) <= 1e-12);
  // diagonal of the ground block is nu * n, excited block nu * n - delta
  const auto d = displacement_exponential(c, 1);
  for (int n = 0; n < 6; ++n) {
    CHECK(std::abs(h(n, n).real() - n) < 1e-12);
  }
  // off-diagonal coupling block
  const OperatorMatrix expected = 0.5 * p.omega * std::polar(1.0, p.phi) * d;
  CHECK((h.bottomLeftCorner(6, 6) - expected).cwiseAbs().maxCoeff() < 1e-12);
  const OperatorMatrix e_block = h.bottomRightCorner(6, 6);
  for (int n = 0; n < 6; ++n) CHECK(std::abs(e_block(n, n).real() - (n - p.delta)) < 1e-12);
}

TEST_CASE("propagate agrees with the Taylor expm oracle") {
  std::mt19937_64 rng(7);
  for (int cutoff : {2, 4, 10, 20}) {
    SystemConfig c;
    c.cutoff = cutoff;
    for (int trial = 0; trial < 3; ++trial) {
      const auto p = random_params(rng);
      const auto h = build_hamiltonian(c, p);
      const auto u = propagate(h, p.t);
      const auto ref = oracle::expm(Complex(0.0, -p.t) * h);
      CHECK((u - ref).cwiseAbs().maxCoeff() <= 1e-9);
      CHECK(max_unitarity_defect(u) <= 1e-10);
    }
  }
}

TEST_CASE("propagate edge cases") {
  SystemConfig c;
  const auto h = build_hamiltonian(c, PulseParams{});
  CHECK((propagate(h, 0.0) - OperatorMatrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(propagate(h, -1.0), Error);
  OperatorMatrix bad = h;
  bad(0, 1) += 1.0;
  try {
    propagate(bad, 1.0);
    FAIL("expected a contract error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::contract);
  }
}

TEST_CASE("ideal blue sideband matches per-rung 2x2 rotations") {
  for (int cutoff : {3, 6}) {
    SystemConfig c;
    c.cutoff = cutoff;
    for (double theta : {0.3, std::numbers::pi, 2.7}) {
      for (double phi : {0.0, 0.95, -2.0}) {
        const auto u = ideal_bsb_propagator(c, theta, phi);
        CHECK((u - oracle::bsb_rungs(cutoff, theta, phi)).cwiseAbs().maxCoeff() < 1e-12);
      }
    }
  }
}

TEST_CASE("ideal blue sideband pi pulse swaps |g,0> and |e,1>") {
  SystemConfig c;
  const auto u = ideal_bsb_propagator(c, std::numbers::pi, 0.0);
  CHECK(std::abs(u(c.cutoff + 1, 0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hermitian spectrum evolve reproduces propagate") {
  SystemConfig c;
  c.cutoff = 8;
  const auto h = build_hamiltonian(c, PulseParams{1.0, 0.1, 0.4, 0.0});
  const auto spec = hermitian_spectrum(h);
  CHECK((spec.evolve(123.4) - propagate(h, 123.4)).cwiseAbs().maxCoeff() < 1e-12);
}
