#include "fockpulse/robustness.hpp"

#include "fockpulse/error.hpp"
#include "fockpulse/objective.hpp"
#include "parallel.hpp"

#include <cmath>
#include <string>

namespace fockpulse {

void SweepSpec::validate() const {
  if (points < 3) {
    throw Error(ErrorCode::config, "a sweep needs at least 3 points");
  }
  if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower <= 0.0 && upper >= 0.0)) {
    throw Error(ErrorCode::config, "sweep range must be finite and contain 0");
  }
}

std::vector<double> SweepSpec::offsets() const {
  validate();
  std::vector<double> out(static_cast<std::size_t>(points));
  const double step = (upper - lower) / (points - 1);
  for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = lower + step * i;
  // Snap the sample closest to zero onto zero so the unperturbed pulse is
  // always evaluated exactly.
  std::size_t nearest = 0;
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (std::abs(out[i]) < std::abs(out[nearest])) nearest = i;
  }
  if (std::abs(out[nearest]) < 0.5 * step) out[nearest] = 0.0;
  return out;
}

double probe_probability(const SystemConfig& cfg, const CompositePulse& cp, const Probe& probe) {
  if (!cfg.contains_fock(probe.input_fock)) {
    throw Error(ErrorCode::index, "probe input state outside the retained window");
  }
  const OperatorMatrix u = composite_unitary(cfg, cp);
  const int in = probe.input_fock - cfg.fock_offset;
  if (probe.target_fock) {
    if (!cfg.contains_fock(*probe.target_fock)) {
      throw Error(ErrorCode::index, "probe target state outside the retained window");
    }
    const int out = cfg.cutoff + (*probe.target_fock - cfg.fock_offset);
    return std::norm(u(out, in));
  }
  return excitation_profile(u)[in];
}

CompositePulse perturbed(const CompositePulse& cp, const SweepSpec& spec, double offset,
                         bool* clamped) {
  CompositePulse out = cp;
  bool hit = false;
  for (std::size_t k = 0; k < out.pulses.size(); ++k) {
    if (spec.which && *spec.which != k) continue;
    auto& p = out.pulses[k];
    if (spec.axis == SweepAxis::duration_offset) {
      p.t += offset;
      if (p.t < 0.0) {
        p.t = 0.0;
        hit = true;
      }
    } else if (k > 0) {
      p.phi += offset;
    }
  }
  if (clamped) *clamped = hit;
  return out;
}

std::vector<SweepPoint> sweep(const SystemConfig& cfg, const CompositePulse& cp,
                              const SweepSpec& spec, const Probe& probe, int threads) {
  cfg.validate();
  const auto offsets = spec.offsets();
  if (spec.which && *spec.which >= cp.size()) {
    throw Error(ErrorCode::index, "sweep pulse index out of range");
  }
  std::vector<SweepPoint> out(offsets.size());
  detail::parallel_for(offsets.size(), threads, [&](std::size_t i) {
    bool clamped = false;
    const auto p = offsets[i] == 0.0 ? cp : perturbed(cp, spec, offsets[i], &clamped);
    out[i] = {offsets[i], std::clamp(probe_probability(cfg, p, probe), 0.0, 1.0), clamped};
  });
  return out;
}

std::optional<Window> widest_window(const std::vector<SweepPoint>& points, double threshold) {
  if (points.empty()) return std::nullopt;
  std::size_t center = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (std::abs(points[i].offset) < std::abs(points[center].offset)) center = i;
  }
  if (points[center].probability < threshold) return std::nullopt;
  std::size_t lo = center;
  std::size_t hi = center;
  while (lo > 0 && points[lo - 1].probability >= threshold) --lo;
  while (hi + 1 < points.size() && points[hi + 1].probability >= threshold) ++hi;
  return Window{points[lo].offset, points[hi].offset};
}

}  // namespace fockpulse
