#pragma once

#include "fockpulse/fockspace.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fockpulse {

struct PulseParams {
  double delta = 1.0;
  double omega = 0.1;
  double phi = 0.0;
  double t = 0.0;

  bool operator==(const PulseParams&) const = default;
};

// Ordered sequence applied first-to-last with no dead time between pulses.
struct CompositePulse {
  std::vector<PulseParams> pulses;

  std::size_t size() const { return pulses.size(); }
  double total_duration() const;
  bool operator==(const CompositePulse&) const = default;
};

// Product exp(-iH_n t_n) ... exp(-iH_1 t_1).
OperatorMatrix composite_unitary(const SystemConfig& cfg, const CompositePulse& cp);

// Evaluates composite unitaries for one SystemConfig, reusing the
// displacement operator and the eigenpairs of H(delta, omega, phi = 0) for
// recently seen (delta, omega). Copies share the cache; safe to call from
// several threads.
class UnitaryEvaluator {
 public:
  explicit UnitaryEvaluator(const SystemConfig& cfg);

  const SystemConfig& config() const { return cfg_; }
  OperatorMatrix unitary(const CompositePulse& cp) const;
  // Columns of unitary(cp) for the ground-state inputs |g, n>, i.e. the left
  // dim x cutoff block, at roughly half the cost.
  Eigen::MatrixXcd ground_columns(const CompositePulse& cp) const;

 private:
  struct Cache;
  Eigen::MatrixXcd apply(const CompositePulse& cp, Eigen::MatrixXcd state) const;

  SystemConfig cfg_;
  std::shared_ptr<Cache> cache_;
};

// Three-pulse weak-coupling SWAP derived from the ideal blue-sideband model:
// t1 = t3 = pi/(sqrt(2) eta omega), t2 = sqrt(2) pi/(eta omega),
// phi2 = arccos(cot^2(pi/sqrt(2))), delta = 1.
CompositePulse analytic_swap_parameters(const SystemConfig& cfg, double omega);

// Maps phi into [0, 2*pi). Only used when reading or writing pulses.
double canonical_phase(double phi);
CompositePulse canonicalized(CompositePulse cp);

enum class PulseField { delta, omega, phi, t };

const char* to_string(PulseField f);
PulseField pulse_field_from_string(const std::string& s);

struct FieldRef {
  std::size_t pulse = 0;
  PulseField field = PulseField::t;
};

// One optimisable coordinate. Several members form a shared group that is
// always set to the same value.
struct FreeEntry {
  std::vector<FieldRef> members;
  double lower = 0.0;
  double upper = 0.0;
};

struct ParamLayout {
  std::vector<FreeEntry> entries;

  std::size_t size() const { return entries.size(); }
  // Throws Error(layout) on empty groups, bad bounds or out-of-range pulses.
  void validate(std::size_t pulse_count) const;
  std::vector<double> lower_bounds() const;
  std::vector<double> upper_bounds() const;
};

std::vector<double> pack(const CompositePulse& cp, const ParamLayout& layout);
CompositePulse unpack(std::span<const double> values, const CompositePulse& tmpl,
                      const ParamLayout& layout);

double default_max_duration(const SystemConfig& cfg, double omega);

// Weak coupling: free {t_k, phi_k for k >= 2}; delta and omega fixed.
ParamLayout weak_coupling_layout(const SystemConfig& cfg, std::size_t pulse_count,
                                 double omega);
// Strong coupling: the weak set plus one delta shared by all pulses.
ParamLayout strong_coupling_layout(const SystemConfig& cfg, std::size_t pulse_count,
                                   double omega, double delta_lower = 0.25,
                                   double delta_upper = 2.5);

// Template with `count` identical pulses; durations at half the default bound.
CompositePulse uniform_template(const SystemConfig& cfg, std::size_t count, double omega,
                                double delta);

}  // namespace fockpulse
