#include "fockpulse/pulses.hpp"

#include "fockpulse/error.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

namespace fockpulse {

double CompositePulse::total_duration() const {
  double sum = 0.0;
  for (const auto& p : pulses) sum += p.t;
  return sum;
}

struct UnitaryEvaluator::Cache {
  struct Entry {
    double delta;
    double omega;
    std::shared_ptr<const HermitianSpectrum> spectrum;
  };
  OperatorMatrix displacement;
  std::mutex mutex;
  std::vector<Entry> entries;
};

UnitaryEvaluator::UnitaryEvaluator(const SystemConfig& cfg)
    : cfg_(cfg), cache_(std::make_shared<Cache>()) {
  cfg_.validate();
  cache_->displacement = displacement_exponential(cfg_, 1);
}

Eigen::MatrixXcd UnitaryEvaluator::apply(const CompositePulse& cp,
                                         Eigen::MatrixXcd state) const {
  if (cp.pulses.empty()) {
    throw Error(ErrorCode::parameter, "composite pulse must contain at least one pulse");
  }
  constexpr std::size_t kMaxEntries = 64;
  const int n = cfg_.cutoff;

  // H(delta, omega, phi) = D H(delta, omega, 0) D^dag with
  // D = diag(1 on ground, e^{i phi} on excited), so one eigendecomposition
  // serves every phase.
  auto spectrum_for = [&](const PulseParams& p) {
    {
      std::lock_guard lock(cache_->mutex);
      for (const auto& e : cache_->entries) {
        if (e.delta == p.delta && e.omega == p.omega) return e.spectrum;
      }
    }
    const PulseParams base{p.delta, p.omega, 0.0, 0.0};
    auto spec = std::make_shared<const HermitianSpectrum>(
        hermitian_spectrum(build_hamiltonian(cfg_, base, cache_->displacement)));
    std::lock_guard lock(cache_->mutex);
    if (cache_->entries.size() >= kMaxEntries) cache_->entries.clear();
    cache_->entries.push_back({p.delta, p.omega, spec});
    return spec;
  };

  for (const auto& p : cp.pulses) {
    if (!(p.t >= 0.0) || !std::isfinite(p.t) || !std::isfinite(p.phi)) {
      throw Error(ErrorCode::parameter, "pulse duration must be finite and >= 0");
    }
    const auto spec = spectrum_for(p);
    const Complex rot = std::polar(1.0, p.phi);
    const Eigen::VectorXcd phases =
        (spec->values.cast<Complex>() * Complex(0.0, -p.t / cfg_.hbar)).array().exp();
    state.bottomRows(n) *= std::conj(rot);
    Eigen::MatrixXcd rotated = spec->vectors.adjoint() * state;
    rotated = phases.asDiagonal() * rotated;
    state.noalias() = spec->vectors * rotated;
    state.bottomRows(n) *= rot;
  }
  return state;
}

OperatorMatrix UnitaryEvaluator::unitary(const CompositePulse& cp) const {
  return apply(cp, OperatorMatrix::Identity(cfg_.dim(), cfg_.dim()));
}

Eigen::MatrixXcd UnitaryEvaluator::ground_columns(const CompositePulse& cp) const {
  return apply(cp, OperatorMatrix::Identity(cfg_.dim(), cfg_.dim()).leftCols(cfg_.cutoff));
}

OperatorMatrix composite_unitary(const SystemConfig& cfg, const CompositePulse& cp) {
  return UnitaryEvaluator(cfg).unitary(cp);
}

CompositePulse analytic_swap_parameters(const SystemConfig& cfg, double omega) {
  cfg.validate();
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw Error(ErrorCode::parameter, "omega must be positive");
  }
  using std::numbers::pi;
  using std::numbers::sqrt2;
  const double outer = pi / (sqrt2 * cfg.eta * omega);
  const double inner = sqrt2 * pi / (cfg.eta * omega);
  const double cot = 1.0 / std::tan(pi / sqrt2);
  const double phi2 = std::acos(cot * cot);
  return CompositePulse{{
      {1.0, omega, 0.0, outer},
      {1.0, omega, phi2, inner},
      {1.0, omega, 0.0, outer},
  }};
}

double canonical_phase(double phi) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(phi, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

CompositePulse canonicalized(CompositePulse cp) {
  for (auto& p : cp.pulses) p.phi = canonical_phase(p.phi);
  return cp;
}

const char* to_string(PulseField f) {
  switch (f) {
    case PulseField::delta: return "delta";
    case PulseField::omega: return "omega";
    case PulseField::phi: return "phi";
    case PulseField::t: return "t";
  }
  return "?";
}

PulseField pulse_field_from_string(const std::string& s) {
  if (s == "delta") return PulseField::delta;
  if (s == "omega") return PulseField::omega;
  if (s == "phi") return PulseField::phi;
  if (s == "t") return PulseField::t;
  throw Error(ErrorCode::layout, "unknown pulse field '" + s + "'");
}

namespace {

double& field_ref(PulseParams& p, PulseField f) {
  switch (f) {
    case PulseField::delta: return p.delta;
    case PulseField::omega: return p.omega;
    case PulseField::phi: return p.phi;
    case PulseField::t: return p.t;
  }
  return p.t;
}

double field_value(const PulseParams& p, PulseField f) {
  PulseParams copy = p;
  return field_ref(copy, f);
}

}  // namespace

void ParamLayout::validate(std::size_t pulse_count) const {
  if (entries.empty()) {
    throw Error(ErrorCode::layout, "layout has no free entries");
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.members.empty()) {
      throw Error(ErrorCode::layout, "free entry " + std::to_string(i) + " has no members");
    }
    if (!std::isfinite(e.lower) || !std::isfinite(e.upper) || e.lower > e.upper) {
      throw Error(ErrorCode::layout,
                  "free entry " + std::to_string(i) + " needs finite bounds lower <= upper");
    }
    for (const auto& m : e.members) {
      if (m.pulse >= pulse_count) {
        throw Error(ErrorCode::layout, "free entry " + std::to_string(i) +
                                           " references pulse " + std::to_string(m.pulse) +
                                           " of " + std::to_string(pulse_count));
      }
    }
  }
}

std::vector<double> ParamLayout::lower_bounds() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.lower);
  return out;
}

std::vector<double> ParamLayout::upper_bounds() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.upper);
  return out;
}

std::vector<double> pack(const CompositePulse& cp, const ParamLayout& layout) {
  layout.validate(cp.size());
  std::vector<double> out;
  out.reserve(layout.size());
  for (const auto& e : layout.entries) {
    const auto& first = e.members.front();
    out.push_back(field_value(cp.pulses[first.pulse], first.field));
  }
  return out;
}

CompositePulse unpack(std::span<const double> values, const CompositePulse& tmpl,
                      const ParamLayout& layout) {
  layout.validate(tmpl.size());
  if (values.size() != layout.size()) {
    throw Error(ErrorCode::layout, "parameter vector has " + std::to_string(values.size()) +
                                       " entries, layout expects " +
                                       std::to_string(layout.size()));
  }
  CompositePulse out = tmpl;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    for (const auto& m : layout.entries[i].members) {
      field_ref(out.pulses[m.pulse], m.field) = values[i];
    }
  }
  return out;
}

double default_max_duration(const SystemConfig& cfg, double omega) {
  if (!(omega > 0.0)) {
    throw Error(ErrorCode::parameter, "omega must be positive");
  }
  return 4.0 * std::numbers::pi / (cfg.eta * omega);
}

ParamLayout weak_coupling_layout(const SystemConfig& cfg, std::size_t pulse_count,
                                 double omega) {
  if (pulse_count == 0) {
    throw Error(ErrorCode::layout, "pulse_count must be >= 1");
  }
  const double tmax = default_max_duration(cfg, omega);
  ParamLayout layout;
  for (std::size_t k = 0; k < pulse_count; ++k) {
    layout.entries.push_back({{{k, PulseField::t}}, 0.0, tmax});
  }
  for (std::size_t k = 1; k < pulse_count; ++k) {
    layout.entries.push_back({{{k, PulseField::phi}}, 0.0, 2.0 * std::numbers::pi});
  }
  return layout;
}

ParamLayout strong_coupling_layout(const SystemConfig& cfg, std::size_t pulse_count,
                                   double omega, double delta_lower, double delta_upper) {
  ParamLayout layout = weak_coupling_layout(cfg, pulse_count, omega);
  FreeEntry shared{{}, delta_lower, delta_upper};
  for (std::size_t k = 0; k < pulse_count; ++k) {
    shared.members.push_back({k, PulseField::delta});
  }
  layout.entries.push_back(std::move(shared));
  return layout;
}

CompositePulse uniform_template(const SystemConfig& cfg, std::size_t count, double omega,
                                double delta) {
  const double t = 0.5 * default_max_duration(cfg, omega);
  return CompositePulse{std::vector<PulseParams>(count, PulseParams{delta, omega, 0.0, t})};
}

}  // namespace fockpulse
