#include "fockpulse/error.hpp"
#include "fockpulse/objective.hpp"
#include "fockpulse/pulses.hpp"

#include <doctest.h>

#include <numbers>

using namespace fockpulse;

TEST_CASE("swap target layout") {
  const auto t = swap_target(4, 0);
  CHECK(t.dim() == 8);
  CHECK(t.modulus(0, 0) == 0.0);
  CHECK(t.modulus(5, 0) == 1.0);
  CHECK(t.modulus(0, 5) == 1.0);
  CHECK(t.modulus(5, 5) == 0.0);
  CHECK(t.modulus(1, 1) == 1.0);
  CHECK(t.mask.minCoeff() == 1.0);
  CHECK_THROWS_AS(swap_target(4, 3), Error);
  CHECK_NOTHROW(t.validate());
}

TEST_CASE("shelving target compares only the ground quadrant") {
  const auto t = shelving_target(4, 2);
  CHECK(t.mask.topLeftCorner(4, 4).minCoeff() == 1.0);
  CHECK(t.mask.bottomRows(4).maxCoeff() == 0.0);
  CHECK(t.mask.rightCols(4).maxCoeff() == 0.0);
  CHECK(t.modulus(2, 2) == 0.0);
  CHECK(t.modulus(1, 1) == 1.0);
  CHECK_THROWS_AS(shelving_target(4, 4), Error);
}

TEST_CASE("targets by absolute index in a shifted window") {
  SystemConfig c;
  c.cutoff = 12;
  c.fock_offset = 24;
  const auto t = shelving_target(c, 30);
  CHECK(t.modulus(6, 6) == 0.0);
  CHECK_THROWS_AS(shelving_target(c, 3), Error);
  CHECK(target_from_preset(c, "shelve(30)").modulus == t.modulus);
  CHECK(target_from_preset(SystemConfig{}, " swap( 1 ) ").modulus == swap_target(4, 1).modulus);
  CHECK_THROWS_AS(target_from_preset(c, "flip(3)"), Error);
}

TEST_CASE("modulus loss") {
  SystemConfig c;
  const auto spec = swap_target(c, 0);
  // a perfect swap up to arbitrary phases has zero loss
  OperatorMatrix perfect = spec.modulus.cast<Complex>();
  perfect(5, 0) = std::polar(1.0, 0.3);
  perfect(0, 5) = std::polar(1.0, -1.2);
  perfect(3, 3) = std::polar(1.0, 2.0);
  CHECK(modulus_loss(perfect, spec) == doctest::Approx(0.0).epsilon(1e-15));
  // identity misses four entries by 1
  CHECK(modulus_loss(OperatorMatrix::Identity(8, 8), spec) == doctest::Approx(2.0));
  CHECK_THROWS_AS(modulus_loss(OperatorMatrix::Identity(6, 6), spec), Error);
}

TEST_CASE("excitation profile") {
  SystemConfig c;
  const auto u = ideal_bsb_propagator(c, std::numbers::pi, 0.0);
  const auto p = excitation_profile(u);
  REQUIRE(p.size() == 4);
  CHECK(p[0] == doctest::Approx(1.0));
  for (int n = 0; n < 4; ++n) {
    CHECK(p[n] >= 0.0);
    CHECK(p[n] <= 1.0);
  }
  CHECK(p[3] == doctest::Approx(0.0));
  CHECK_THROWS_AS(excitation_profile(OperatorMatrix::Identity(5, 5)), Error);
}
