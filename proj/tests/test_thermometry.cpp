#include "fockpulse/error.hpp"
#include "fockpulse/thermometry.hpp"

#include <doctest.h>

#include <cmath>

using namespace fockpulse;

TEST_CASE("thermal distribution moments") {
  for (double nbar : {0.0, 0.5, 1.0, 3.0}) {
    const auto d = thermal_distribution(nbar, 200);
    CHECK(d.populations.sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d.mean() == doctest::Approx(nbar).epsilon(1e-10));
    // variance nbar (nbar + 1)
    double second = 0.0;
    for (int n = 0; n < 200; ++n) second += n * n * d.populations[n];
    CHECK(second - nbar * nbar == doctest::Approx(nbar * (nbar + 1)).epsilon(1e-9));
    if (nbar > 0) {
      CHECK(d.populations[3] / d.populations[2] == doctest::Approx(nbar / (nbar + 1)));
    }
    CHECK_NOTHROW(d.validate());
  }
  CHECK(thermal_distribution(1.0, 100).populations[0] == doctest::Approx(0.5));
  CHECK_THROWS_AS(thermal_distribution(-1.0, 10), Error);
}

TEST_CASE("explicit distribution and validation") {
  const auto d = explicit_distribution(60, {{29, 0.3}, {30, 0.4}, {31, 0.3}});
  CHECK_NOTHROW(d.validate());
  CHECK(d.mean() == doctest::Approx(30.0));
  CHECK_THROWS_AS(explicit_distribution(10, {{10, 1.0}}), Error);
  const auto bad = explicit_distribution(10, {{1, 0.5}});
  try {
    bad.validate();
    FAIL("expected a normalisation error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("normalise") != std::string::npos);
  }
}

TEST_CASE("correction is the identity when the coefficient matrix is the identity") {
  const Eigen::VectorXd m = Eigen::Vector4d(0.4, 0.3, 0.2, 0.1);
  const auto c = correct_populations({Eigen::MatrixXd::Identity(4, 4), m});
  CHECK(c.corrected == m);
  CHECK(c.condition == doctest::Approx(1.0));
}

TEST_CASE("correction inverts a known mixing matrix") {
  Eigen::Matrix3d a;
  a << 0.95, 0.03, 0.01, 0.02, 0.9, 0.05, 0.0, 0.04, 0.97;
  const Eigen::Vector3d p(0.5, 0.3, 0.2);
  const auto c = correct_populations({a, a * p});
  CHECK((c.corrected - p).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("ill-conditioned systems are refused with the condition number") {
  Eigen::Matrix2d a;
  a << 1.0, 1.0, 1.0, 1.0 + 1e-12;
  try {
    correct_populations({a, Eigen::Vector2d(1.0, 1.0)});
    FAIL("expected IllConditionedError");
  } catch (const IllConditionedError& e) {
    CHECK(e.condition() > kMaxCondition);
  }
  CHECK_THROWS_AS(correct_populations({Eigen::MatrixXd::Zero(2, 2), Eigen::Vector2d(1, 1)}),
                  IllConditionedError);
  CHECK_THROWS_AS(correct_populations({Eigen::MatrixXd::Identity(2, 3), Eigen::Vector2d(1, 1)}),
                  Error);
}

TEST_CASE("coefficient matrix and measurements for ideal blue-sideband pulses") {
  // Use three pulses whose excitation profiles are easy to reason about and
  // check the shapes and the forward model M = sum_n profile_n P_n.
  SystemConfig design;
  design.cutoff = 6;
  SystemConfig truth;
  truth.cutoff = 30;
  const std::vector<CompositePulse> pulses{
      {{{1.0, 0.1, 0.0, 300.0}}}, {{{1.0, 0.1, 0.0, 600.0}}}, {{{1.0, 0.1, 0.0, 900.0}}}};
  const std::vector<int> window{0, 1, 2};
  const auto a = coefficient_matrix(design, pulses, window);
  CHECK(a.rows() == 3);
  CHECK(a.cols() == 3);
  CHECK(a.minCoeff() >= 0.0);
  CHECK(a.maxCoeff() <= 1.0);

  const auto dist = thermal_distribution(0.5, 30);
  const auto m = simulate_measurements(truth, pulses, dist);
  for (int k = 0; k < 3; ++k) {
    const auto prof = excitation_profile(composite_unitary(truth, pulses[k]));
    CHECK(m[k] == doctest::Approx(prof.dot(dist.populations)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(coefficient_matrix(design, pulses, {0, 1}), Error);
  CHECK_THROWS_AS(coefficient_matrix(design, pulses, {0, 1, 9}), Error);
  CHECK_THROWS_AS(simulate_measurements(truth, pulses, thermal_distribution(0.5, 20)), Error);
}

TEST_CASE("shot noise is seeded and unbiased in the limit") {
  SystemConfig truth;
  truth.cutoff = 20;
  const std::vector<CompositePulse> pulses{{{{1.0, 0.1, 0.0, 374.0}}}};
  const auto dist = thermal_distribution(0.3, 20);
  const auto exact = simulate_measurements(truth, pulses, dist);
  const auto a = simulate_measurements(truth, pulses, dist, {1000, 5});
  const auto b = simulate_measurements(truth, pulses, dist, {1000, 5});
  CHECK(a == b);
  CHECK(std::abs(a[0] - exact[0]) < 0.06);
  const auto many = simulate_measurements(truth, pulses, dist, {2000000, 1});
  CHECK(std::abs(many[0] - exact[0]) < 2e-3);
}

TEST_CASE("padded design space") {
  const auto s = padded_design_space(SystemConfig{}, {29, 30, 31}, 5);
  CHECK(s.fock_offset == 24);
  CHECK(s.max_fock() == 36);
  const auto low = padded_design_space(SystemConfig{}, {0, 1}, 5);
  CHECK(low.fock_offset == 0);
  CHECK_THROWS_AS(padded_design_space(SystemConfig{}, {}, 5), Error);
}

TEST_CASE("thermometry pipeline with predesigned pulses") {
  ThermometryConfig cfg;
  cfg.design.cutoff = 6;
  cfg.truth.cutoff = 40;
  cfg.window = {0, 1};
  const std::vector<CompositePulse> pulses{{{{1.0, 0.1, 0.0, 374.0}}},
                                           {{{1.0, 0.1, 0.0, 264.0}}}};
  const auto dist = thermal_distribution(0.2, 40);
  const auto r = run_thermometry(cfg, dist, pulses);
  CHECK(r.window == cfg.window);
  CHECK(r.truth[0] == doctest::Approx(dist.populations[0]));
  CHECK(r.profiles.size() == 2);
  CHECK(r.losses.size() == 2);
  CHECK(r.condition >= 1.0);
  CHECK((r.coeff * r.corrected - r.measured).cwiseAbs().maxCoeff() < 1e-12);

  ThermometryConfig bad = cfg;
  bad.window = {0, 9};
  try {
    run_thermometry(bad, dist, pulses);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("config:", 0) == 0);
  }
  bad = cfg;
  bad.truth.cutoff = 5;
  CHECK_THROWS_AS(run_thermometry(bad, thermal_distribution(0.2, 5), pulses), Error);
}
