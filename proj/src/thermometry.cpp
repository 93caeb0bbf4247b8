#include "fockpulse/thermometry.hpp"

#include "fockpulse/error.hpp"
#include "parallel.hpp"

#include <cmath>
#include <random>
#include <string>

namespace fockpulse {

double PhononDistribution::mean() const {
  double m = 0.0;
  for (Eigen::Index n = 0; n < populations.size(); ++n) {
    m += static_cast<double>(n) * populations[n];
  }
  return m;
}

void PhononDistribution::validate(double tol) const {
  if (populations.size() < 1) {
    throw Error(ErrorCode::parameter, "distribution is empty");
  }
  if (!populations.allFinite() || populations.minCoeff() < 0.0) {
    throw Error(ErrorCode::parameter, "populations must be finite and non-negative");
  }
  const double sum = populations.sum();
  if (std::abs(sum - 1.0) > tol) {
    throw Error(ErrorCode::parameter,
                "populations sum to " + std::to_string(sum) + ", expected 1 (normalise the input)");
  }
}

PhononDistribution thermal_distribution(double nbar, int big_cutoff) {
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
    throw Error(ErrorCode::parameter, "mean phonon number must be >= 0");
  }
  if (big_cutoff < 2) {
    throw Error(ErrorCode::config, "distribution cutoff must be >= 2");
  }
  Eigen::VectorXd p(big_cutoff);
  const double ratio = nbar / (1.0 + nbar);
  double term = 1.0 / (1.0 + nbar);
  for (int n = 0; n < big_cutoff; ++n) {
    p[n] = term;
    term *= ratio;
  }
  p /= p.sum();
  return {p};
}

PhononDistribution explicit_distribution(int big_cutoff,
                                         const std::vector<std::pair<int, double>>& entries) {
  if (big_cutoff < 2) {
    throw Error(ErrorCode::config, "distribution cutoff must be >= 2");
  }
  PhononDistribution d{Eigen::VectorXd::Zero(big_cutoff)};
  for (const auto& [n, p] : entries) {
    if (n < 0 || n >= big_cutoff) {
      throw Error(ErrorCode::index, "population index " + std::to_string(n) +
                                        " outside [0, " + std::to_string(big_cutoff) + ")");
    }
    d.populations[n] += p;
  }
  return d;
}

Eigen::MatrixXd coefficient_matrix(const SystemConfig& cfg,
                                   const std::vector<CompositePulse>& pulses,
                                   const std::vector<int>& window) {
  cfg.validate();
  if (pulses.size() != window.size()) {
    throw Error(ErrorCode::shape, "need one pulse per window state (" +
                                      std::to_string(pulses.size()) + " pulses, " +
                                      std::to_string(window.size()) + " window states)");
  }
  for (int n : window) {
    if (!cfg.contains_fock(n)) {
      throw Error(ErrorCode::index, "window state " + std::to_string(n) +
                                        " outside the design space [" +
                                        std::to_string(cfg.fock_offset) + ", " +
                                        std::to_string(cfg.max_fock()) + "]");
    }
  }
  const auto k = static_cast<Eigen::Index>(window.size());
  Eigen::MatrixXd a(k, k);
  for (Eigen::Index m = 0; m < k; ++m) {
    const Eigen::VectorXd profile =
        excitation_profile(composite_unitary(cfg, pulses[static_cast<std::size_t>(m)]));
    for (Eigen::Index n = 0; n < k; ++n) {
      a(m, n) = profile[window[static_cast<std::size_t>(n)] - cfg.fock_offset];
    }
  }
  return a;
}

Eigen::VectorXd simulate_measurements(const SystemConfig& cfg_big,
                                      const std::vector<CompositePulse>& pulses,
                                      const PhononDistribution& dist, const ShotNoise& noise) {
  cfg_big.validate();
  if (cfg_big.fock_offset != 0) {
    throw Error(ErrorCode::config, "truth simulation must start at Fock state 0");
  }
  if (dist.populations.size() != cfg_big.cutoff) {
    throw Error(ErrorCode::config, "distribution has " +
                                       std::to_string(dist.populations.size()) +
                                       " levels but the truth cutoff is " +
                                       std::to_string(cfg_big.cutoff));
  }
  dist.validate();
  Eigen::VectorXd m(static_cast<Eigen::Index>(pulses.size()));
  std::mt19937_64 engine(noise.seed);
  for (std::size_t i = 0; i < pulses.size(); ++i) {
    const Eigen::VectorXd profile = excitation_profile(composite_unitary(cfg_big, pulses[i]));
    double value = std::clamp(profile.dot(dist.populations), 0.0, 1.0);
    if (noise.shots > 0) {
      std::binomial_distribution<std::uint64_t> draw(noise.shots, value);
      value = static_cast<double>(draw(engine)) / static_cast<double>(noise.shots);
    }
    m[static_cast<Eigen::Index>(i)] = value;
  }
  return m;
}

Correction correct_populations(const CorrectionProblem& problem) {
  const auto& a = problem.coeff;
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorCode::shape, "coefficient matrix must be square and non-empty");
  }
  if (problem.measured.size() != a.rows()) {
    throw Error(ErrorCode::shape, "measured vector length does not match the coefficient matrix");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  const double smax = sv[0];
  const double smin = sv[sv.size() - 1];
  const double condition =
      smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(condition <= kMaxCondition)) {
    throw IllConditionedError(condition, "coefficient matrix is ill-conditioned (condition " +
                                             std::to_string(condition) +
                                             "); the pulses cannot separate the window states");
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  return {lu.solve(problem.measured), condition};
}

double ThermometryReport::max_corrected_error() const {
  return (corrected - truth).cwiseAbs().maxCoeff();
}

double ThermometryReport::max_measured_error() const {
  return (measured - truth).cwiseAbs().maxCoeff();
}

SystemConfig padded_design_space(const SystemConfig& base, const std::vector<int>& window,
                                 int pad) {
  if (window.empty()) {
    throw Error(ErrorCode::config, "window is empty");
  }
  if (pad < 0) {
    throw Error(ErrorCode::config, "pad must be >= 0");
  }
  const auto [lo, hi] = std::minmax_element(window.begin(), window.end());
  SystemConfig out = base;
  out.fock_offset = std::max(0, *lo - pad);
  out.cutoff = *hi + pad - out.fock_offset + 1;
  return out;
}

namespace {

template <class Fn>
auto with_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const IllConditionedError& e) {
    throw IllConditionedError(e.condition(), std::string(stage) + ": " + e.what());
  } catch (const Error& e) {
    throw Error(e.code(), std::string(stage) + ": " + e.what());
  }
}

}  // namespace

ThermometryReport run_thermometry(const ThermometryConfig& cfg, const PhononDistribution& dist,
                                  const std::vector<CompositePulse>& predesigned,
                                  const ProgressCallback& progress) {
  with_stage("config", [&] {
    cfg.design.validate();
    cfg.truth.validate();
    if (cfg.window.empty()) {
      throw Error(ErrorCode::config, "window is empty");
    }
    for (int n : cfg.window) {
      if (!cfg.design.contains_fock(n)) {
        throw Error(ErrorCode::index,
                    "window state " + std::to_string(n) + " outside the design space");
      }
    }
    if (cfg.truth.fock_offset != 0 || cfg.truth.cutoff <= cfg.design.max_fock()) {
      throw Error(ErrorCode::config, "truth space must start at 0 and cover the design space");
    }
    if (!predesigned.empty() && predesigned.size() != cfg.window.size()) {
      throw Error(ErrorCode::config, "need one predesigned pulse per window state");
    }
    return 0;
  });

  ThermometryReport report;
  report.window = cfg.window;
  const std::size_t k = cfg.window.size();

  with_stage("design", [&] {
    if (!predesigned.empty()) {
      report.pulses = predesigned;
      report.losses.resize(k);
      for (std::size_t i = 0; i < k; ++i) {
        report.losses[i] =
            modulus_loss(composite_unitary(cfg.design, predesigned[i]),
                         shelving_target(cfg.design, cfg.window[i]));
      }
      return 0;
    }
    report.pulses.resize(k);
    report.losses.resize(k);
    detail::parallel_for(k, cfg.threads, [&](std::size_t i) {
      const auto tmpl = uniform_template(cfg.design, cfg.pulse_count, cfg.omega, 1.0);
      const auto layout = cfg.strong
                              ? strong_coupling_layout(cfg.design, cfg.pulse_count, cfg.omega)
                              : weak_coupling_layout(cfg.design, cfg.pulse_count, cfg.omega);
      const auto spec = shelving_target(cfg.design, cfg.window[i]);
      ProgressCallback tagged;
      if (progress) {
        tagged = [&progress, i](const ProgressEvent& e) {
          ProgressEvent copy = e;
          copy.start = static_cast<int>(i);
          progress(copy);
        };
      }
      auto r = design_pulse(cfg.design, tmpl, layout, spec, cfg.optimizer, tagged);
      report.pulses[i] = std::move(r.best);
      report.losses[i] = r.loss;
    });
    return 0;
  });

  with_stage("coefficients", [&] {
    for (const auto& p : report.pulses) {
      report.profiles.push_back(excitation_profile(composite_unitary(cfg.design, p)));
    }
    report.coeff = coefficient_matrix(cfg.design, report.pulses, cfg.window);
    return 0;
  });

  with_stage("measure", [&] {
    report.measured = simulate_measurements(cfg.truth, report.pulses, dist, cfg.noise);
    return 0;
  });

  with_stage("correct", [&] {
    const auto c = correct_populations({report.coeff, report.measured});
    report.corrected = c.corrected;
    report.condition = c.condition;
    return 0;
  });

  report.truth.resize(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    report.truth[static_cast<Eigen::Index>(i)] = dist.populations[cfg.window[i]];
  }
  return report;
}

}  // namespace fockpulse
