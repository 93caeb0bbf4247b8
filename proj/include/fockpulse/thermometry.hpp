#pragma once

#include "fockpulse/optimizer.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fockpulse {

// Diagonal Fock-basis populations over indices [0, size).
struct PhononDistribution {
  Eigen::VectorXd populations;

  double mean() const;
  // Throws Error(parameter) unless every entry is >= 0 and the sum is 1 +- tol.
  void validate(double tol = 1e-9) const;
};

PhononDistribution thermal_distribution(double nbar, int big_cutoff);

// Zero everywhere except the listed (fock, population) pairs.
PhononDistribution explicit_distribution(int big_cutoff,
                                         const std::vector<std::pair<int, double>>& entries);

// a(m, k) = probability that pulse m excites |g, window[k]>, evaluated on cfg.
// Window entries are absolute Fock indices inside cfg's retained window.
Eigen::MatrixXd coefficient_matrix(const SystemConfig& cfg,
                                   const std::vector<CompositePulse>& pulses,
                                   const std::vector<int>& window);

struct ShotNoise {
  std::uint64_t shots = 0;  // 0 = exact readout
  std::uint64_t seed = 1;
};

// M_m = sum_n excitation_profile(U_m on cfg_big)[n] * P_n. Readout is the
// exact excited population unless `noise.shots` > 0, in which case each M_m
// is a binomial estimate from that many shelving repetitions.
Eigen::VectorXd simulate_measurements(const SystemConfig& cfg_big,
                                      const std::vector<CompositePulse>& pulses,
                                      const PhononDistribution& dist,
                                      const ShotNoise& noise = {});

struct CorrectionProblem {
  Eigen::MatrixXd coeff;
  Eigen::VectorXd measured;
};

struct Correction {
  Eigen::VectorXd corrected;
  double condition = 0.0;
};

inline constexpr double kMaxCondition = 1e8;

// Solves coeff * R = measured with partial-pivoting LU. Throws
// IllConditionedError when coeff is singular or its 2-norm condition number
// exceeds kMaxCondition.
Correction correct_populations(const CorrectionProblem& problem);

struct ThermometryConfig {
  SystemConfig design;   // pulses are designed and `a` is built here
  SystemConfig truth;    // measurements are simulated here (fock_offset 0)
  std::vector<int> window;
  std::size_t pulse_count = 6;
  double omega = 0.1;
  bool strong = false;   // strong coupling: shared delta optimised
  DesignConfig optimizer;
  ShotNoise noise;
  int threads = 1;       // independent pulse designs run concurrently
};

struct ThermometryReport {
  std::vector<int> window;
  Eigen::VectorXd truth;       // P over the window
  Eigen::VectorXd measured;    // M
  Eigen::VectorXd corrected;   // R
  Eigen::MatrixXd coeff;
  double condition = 0.0;
  std::vector<CompositePulse> pulses;
  std::vector<double> losses;
  std::vector<Eigen::VectorXd> profiles;  // per pulse, on the design cutoff

  double max_corrected_error() const;
  double max_measured_error() const;
};

// Design window (or accept pre-designed pulses), build a at the design
// cutoff, simulate M at the truth cutoff, correct. Stage failures are
// rethrown with the stage name prefixed to the message.
ThermometryReport run_thermometry(const ThermometryConfig& cfg, const PhononDistribution& dist,
                                  const std::vector<CompositePulse>& predesigned = {},
                                  const ProgressCallback& progress = {});

// Shifted design window [first - pad, last + pad] clipped at 0.
SystemConfig padded_design_space(const SystemConfig& base, const std::vector<int>& window,
                                 int pad);

}  // namespace fockpulse
