#pragma once

#include "fockpulse/pulses.hpp"

#include <optional>
#include <vector>

namespace fockpulse {

enum class SweepAxis { duration_offset, phase_offset };

struct SweepSpec {
  SweepAxis axis = SweepAxis::phase_offset;
  // Pulse to perturb (0-based); empty = every pulse. Phase offsets never
  // touch the first pulse, whose phase is the reference.
  std::optional<std::size_t> which;
  double lower = -1.0;
  double upper = 1.0;
  int points = 41;

  void validate() const;
  std::vector<double> offsets() const;
};

// What the sweep measures. With `target_fock` set the probability is
// |<e, target_fock|U|g, input_fock>|^2; otherwise it is the excitation
// probability of |g, input_fock>. Fock indices are absolute.
struct Probe {
  int input_fock = 0;
  std::optional<int> target_fock = 1;
};

struct SweepPoint {
  double offset = 0.0;
  double probability = 0.0;
  bool clamped = false;  // a perturbed duration went negative and was set to 0
};

double probe_probability(const SystemConfig& cfg, const CompositePulse& cp, const Probe& probe);

CompositePulse perturbed(const CompositePulse& cp, const SweepSpec& spec, double offset,
                         bool* clamped = nullptr);

std::vector<SweepPoint> sweep(const SystemConfig& cfg, const CompositePulse& cp,
                              const SweepSpec& spec, const Probe& probe, int threads = 1);

struct Window {
  double lower = 0.0;
  double upper = 0.0;
};

// Widest run of consecutive samples containing offset 0 whose probability is
// >= threshold. Empty if the sample nearest 0 is already below it.
std::optional<Window> widest_window(const std::vector<SweepPoint>& points, double threshold);

}  // namespace fockpulse
