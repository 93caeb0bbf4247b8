#include "fockpulse/fockpulse.h"

#include "fockpulse/error.hpp"
#include "fockpulse/io.hpp"

#include <cstring>
#include <mutex>
#include <new>

using namespace fockpulse;

struct fp_pulse {
  CompositePulse cp;
};

struct fp_config {
  RunConfig cfg;
};

struct fp_design_result {
  OptimizationResult result;
  fp_pulse pulse;
  std::uint64_t seed = 0;
};

struct fp_thermometry_report {
  ThermometryReport report;
  SystemConfig design;
  std::vector<fp_pulse> pulses;
};

namespace {

thread_local std::string g_error;
thread_local double g_condition = 0.0;

fp_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::config: return FP_ERR_CONFIG;
    case ErrorCode::parameter: return FP_ERR_PARAMETER;
    case ErrorCode::index: return FP_ERR_INDEX;
    case ErrorCode::shape: return FP_ERR_SHAPE;
    case ErrorCode::contract: return FP_ERR_CONTRACT;
    case ErrorCode::layout: return FP_ERR_LAYOUT;
    case ErrorCode::numerical: return FP_ERR_NUMERICAL;
    case ErrorCode::ill_conditioned: return FP_ERR_ILL_CONDITIONED;
    case ErrorCode::io: return FP_ERR_IO;
    case ErrorCode::optimization: return FP_ERR_OPTIMIZATION;
  }
  return FP_ERR_INTERNAL;
}

template <class Fn>
fp_status guarded(Fn&& fn) {
  g_error.clear();
  g_condition = 0.0;
  try {
    fn();
    return FP_OK;
  } catch (const IllConditionedError& e) {
    g_error = e.what();
    g_condition = e.condition();
    return FP_ERR_ILL_CONDITIONED;
  } catch (const Error& e) {
    g_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
    return FP_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_error = e.what();
    return FP_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::parameter, std::string(what) + " is NULL");
}

SystemConfig to_core(const fp_system* s) {
  require(s, "system");
  SystemConfig c{s->eta, s->nu, s->hbar, s->cutoff, s->fock_offset};
  c.validate();
  return c;
}

fp_system to_c(const SystemConfig& c) {
  return {c.eta, c.nu, c.hbar, c.cutoff, c.fock_offset};
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ProgressCallback wrap(fp_progress_fn fn, void* user, std::mutex& mutex) {
  if (!fn) return {};
  return [fn, user, &mutex](const ProgressEvent& e) {
    std::lock_guard lock(mutex);
    fn(e.stage, e.start, e.iteration, e.best_loss, user);
  };
}

std::filesystem::path library_dir(const RunConfig& cfg) {
  return std::filesystem::path(cfg.output_dir) / "library";
}

}  // namespace

extern "C" {

const char* fp_version(void) { return "0.1.0"; }

const char* fp_status_name(fp_status status) {
  switch (status) {
    case FP_OK: return "ok";
    case FP_ERR_CONFIG: return "config";
    case FP_ERR_PARAMETER: return "parameter";
    case FP_ERR_INDEX: return "index";
    case FP_ERR_SHAPE: return "shape";
    case FP_ERR_CONTRACT: return "contract";
    case FP_ERR_LAYOUT: return "layout";
    case FP_ERR_NUMERICAL: return "numerical";
    case FP_ERR_ILL_CONDITIONED: return "ill_conditioned";
    case FP_ERR_IO: return "io";
    case FP_ERR_OPTIMIZATION: return "optimization";
    case FP_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* fp_last_error(void) { return g_error.c_str(); }

double fp_last_condition(void) { return g_condition; }

void fp_string_free(char* s) { std::free(s); }

void fp_system_default(fp_system* out) {
  if (out) *out = to_c(SystemConfig{});
}

double fp_time_units_per_microsecond(void) { return kTimeUnitsPerMicrosecond; }

fp_status fp_pulse_create(const fp_pulse_params* params, size_t count, fp_pulse** out) {
  return guarded([&] {
    require(out, "out");
    if (count == 0) throw Error(ErrorCode::parameter, "a pulse needs at least one segment");
    require(params, "params");
    CompositePulse cp;
    for (size_t i = 0; i < count; ++i) {
      cp.pulses.push_back({params[i].delta, params[i].omega, params[i].phi, params[i].t});
    }
    *out = new fp_pulse{std::move(cp)};
  });
}

fp_status fp_pulse_analytic_swap(const fp_system* system, double omega, fp_pulse** out) {
  return guarded([&] {
    require(out, "out");
    *out = new fp_pulse{analytic_swap_parameters(to_core(system), omega)};
  });
}

size_t fp_pulse_size(const fp_pulse* pulse) { return pulse ? pulse->cp.size() : 0; }

fp_status fp_pulse_get(const fp_pulse* pulse, size_t index, fp_pulse_params* out) {
  return guarded([&] {
    require(pulse, "pulse");
    require(out, "out");
    if (index >= pulse->cp.size()) {
      throw Error(ErrorCode::index, "pulse index " + std::to_string(index) + " out of range");
    }
    const auto& p = pulse->cp.pulses[index];
    *out = {p.delta, p.omega, p.phi, p.t};
  });
}

double fp_pulse_total_duration(const fp_pulse* pulse) {
  return pulse ? pulse->cp.total_duration() : 0.0;
}

void fp_pulse_free(fp_pulse* pulse) { delete pulse; }

fp_status fp_unitary(const fp_system* system, const fp_pulse* pulse, double* re, double* im) {
  return guarded([&] {
    require(pulse, "pulse");
    require(re, "re");
    require(im, "im");
    const auto u = composite_unitary(to_core(system), pulse->cp);
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      for (Eigen::Index j = 0; j < u.cols(); ++j) {
        re[i * u.cols() + j] = u(i, j).real();
        im[i * u.cols() + j] = u(i, j).imag();
      }
    }
  });
}

fp_status fp_modulus_matrix(const fp_system* system, const fp_pulse* pulse, double* out) {
  return guarded([&] {
    require(pulse, "pulse");
    require(out, "out");
    const auto m = modulus_matrix(composite_unitary(to_core(system), pulse->cp));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
    }
  });
}

fp_status fp_excitation_profile(const fp_system* system, const fp_pulse* pulse, double* out) {
  return guarded([&] {
    require(pulse, "pulse");
    require(out, "out");
    const auto p = excitation_profile(composite_unitary(to_core(system), pulse->cp));
    std::copy(p.begin(), p.end(), out);
  });
}

fp_status fp_target_loss(const fp_system* system, const fp_pulse* pulse, const char* preset,
                         double* loss) {
  return guarded([&] {
    require(pulse, "pulse");
    require(preset, "preset");
    require(loss, "loss");
    const auto cfg = to_core(system);
    *loss = modulus_loss(composite_unitary(cfg, pulse->cp), target_from_preset(cfg, preset));
  });
}

fp_status fp_config_load(const char* path, fp_config** out) {
  return guarded([&] {
    require(out, "out");
    if (!path || !*path) {
      *out = new fp_config{};
      return;
    }
    if (!std::filesystem::is_regular_file(path)) {
      throw Error(ErrorCode::config, std::string("config file not found: ") + path);
    }
    *out = new fp_config{run_config_from_json(read_json_file(path))};
  });
}

fp_status fp_config_parse(const char* json_text, fp_config** out) {
  return guarded([&] {
    require(out, "out");
    require(json_text, "json_text");
    json j;
    try {
      j = json::parse(json_text);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::config, e.what());
    }
    *out = new fp_config{run_config_from_json(j)};
  });
}

void fp_config_free(fp_config* cfg) { delete cfg; }

fp_status fp_config_set_seed(fp_config* cfg, uint64_t seed) {
  return guarded([&] {
    require(cfg, "cfg");
    cfg->cfg.seeds = {seed};
  });
}

fp_status fp_config_set_cutoff(fp_config* cfg, int cutoff) {
  return guarded([&] {
    require(cfg, "cfg");
    SystemConfig s = cfg->cfg.system;
    s.cutoff = cutoff;
    s.validate();
    cfg->cfg.system = s;
  });
}

fp_status fp_config_set_output_dir(fp_config* cfg, const char* dir) {
  return guarded([&] {
    require(cfg, "cfg");
    require(dir, "dir");
    cfg->cfg.output_dir = dir;
  });
}

fp_status fp_config_get_system(const fp_config* cfg, fp_system* out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    *out = to_c(cfg->cfg.system);
  });
}

double fp_config_omega(const fp_config* cfg) { return cfg ? cfg->cfg.omega : 0.0; }

double fp_config_max_loss(const fp_config* cfg) { return cfg ? cfg->cfg.max_loss : 0.0; }

fp_status fp_config_output_dir(const fp_config* cfg, char** out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    *out = dup(cfg->cfg.output_dir);
  });
}

fp_status fp_config_target(const fp_config* cfg, char** out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    *out = dup(cfg->cfg.target);
  });
}

fp_status fp_config_to_json(const fp_config* cfg, char** out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    *out = dup(to_json(cfg->cfg).dump(2));
  });
}

fp_status fp_config_library_dir(const fp_config* cfg, char** out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    *out = dup(library_dir(cfg->cfg).string());
  });
}

fp_status fp_design(const fp_config* cfg, fp_progress_fn progress, void* user,
                    fp_design_result** out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    const RunConfig& rc = cfg->cfg;
    const auto spec = target_from_preset(rc.system, rc.target);
    const auto layout = rc.layout();
    const auto tmpl = rc.pulse_template();
    std::mutex mutex;
    const auto cb = wrap(progress, user, mutex);

    std::optional<fp_design_result> best;
    for (const auto seed : rc.seeds) {
      DesignConfig dc = rc.optimizer;
      dc.pso.seed = seed;
      auto r = design_pulse(rc.system, tmpl, layout, spec, dc, cb);
      r.best = canonicalized(r.best);
      r.loss = modulus_loss(composite_unitary(rc.system, r.best), spec);
      const bool better =
          !best || r.loss < best->result.loss - 1e-12 ||
          (r.loss <= best->result.loss + 1e-12 &&
           r.best.total_duration() < best->result.best.total_duration());
      if (better) {
        fp_design_result next;
        next.pulse.cp = r.best;
        next.seed = seed;
        next.result = std::move(r);
        best = std::move(next);
      }
    }
    *out = new fp_design_result(std::move(*best));
  });
}

double fp_design_loss(const fp_design_result* r) { return r ? r->result.loss : 0.0; }

uint64_t fp_design_seed(const fp_design_result* r) { return r ? r->seed : 0; }

size_t fp_design_evaluations(const fp_design_result* r) { return r ? r->result.evaluations : 0; }

const fp_pulse* fp_design_pulse(const fp_design_result* r) { return r ? &r->pulse : nullptr; }

size_t fp_design_history_size(const fp_design_result* r) {
  return r ? r->result.history.size() : 0;
}

fp_status fp_design_history(const fp_design_result* r, int* iterations, double* losses) {
  return guarded([&] {
    require(r, "result");
    for (std::size_t i = 0; i < r->result.history.size(); ++i) {
      if (iterations) iterations[i] = r->result.history[i].iteration;
      if (losses) losses[i] = r->result.history[i].loss;
    }
  });
}

void fp_design_result_free(fp_design_result* r) { delete r; }

fp_status fp_library_save(const char* dir, const fp_system* system, const char* target,
                          const fp_pulse* pulse, double loss, const char* provenance_json,
                          char** id_out, char** path_out) {
  return guarded([&] {
    require(dir, "dir");
    require(target, "target");
    require(pulse, "pulse");
    json provenance = json::object();
    if (provenance_json && *provenance_json) {
      try {
        provenance = json::parse(provenance_json);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::parameter, std::string("provenance: ") + e.what());
      }
    }
    const auto entry =
        make_library_entry(to_core(system), target, pulse->cp, loss, std::move(provenance));
    const auto path = save_library_entry(entry, dir);
    if (id_out) *id_out = dup(entry.id);
    if (path_out) *path_out = dup(path.string());
  });
}

fp_status fp_library_load(const char* dir, const char* ref, fp_pulse** pulse, fp_system* system,
                          char** target, char** id, double* loss) {
  return guarded([&] {
    require(ref, "ref");
    require(pulse, "pulse");
    const auto entry = load_library_entry(dir ? dir : ".", ref);
    *pulse = new fp_pulse{entry.pulse};
    if (system) *system = to_c(entry.system);
    if (target) *target = dup(entry.target);
    if (id) *id = dup(entry.id);
    if (loss) *loss = entry.loss;
  });
}

fp_status fp_thermometry_run(const fp_config* cfg, fp_progress_fn progress, void* user,
                             fp_thermometry_report** out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    const RunConfig& rc = cfg->cfg;
    const auto tc = rc.thermometry_config();
    const auto dist = rc.distribution();
    std::vector<CompositePulse> predesigned;
    for (const auto& ref : rc.thermometry.pulses) {
      const auto entry = load_library_entry(library_dir(rc), ref);
      if (entry.system.cutoff != tc.design.cutoff ||
          entry.system.fock_offset != tc.design.fock_offset || entry.system.eta != tc.design.eta ||
          entry.system.nu != tc.design.nu || entry.system.hbar != tc.design.hbar) {
        throw Error(ErrorCode::config,
                    "library pulse " + entry.id + " was designed for a different system");
      }
      predesigned.push_back(entry.pulse);
    }
    std::mutex mutex;
    auto result = std::make_unique<fp_thermometry_report>();
    result->report = run_thermometry(tc, dist, predesigned, wrap(progress, user, mutex));
    result->design = tc.design;
    for (auto& p : result->report.pulses) {
      p = canonicalized(p);
      result->pulses.push_back({p});
    }
    *out = result.release();
  });
}

size_t fp_report_window_size(const fp_thermometry_report* r) {
  return r ? r->report.window.size() : 0;
}

fp_status fp_report_vectors(const fp_thermometry_report* r, int* window, double* truth,
                            double* measured, double* corrected) {
  return guarded([&] {
    require(r, "report");
    const auto& rep = r->report;
    for (std::size_t i = 0; i < rep.window.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      if (window) window[i] = rep.window[i];
      if (truth) truth[i] = rep.truth[k];
      if (measured) measured[i] = rep.measured[k];
      if (corrected) corrected[i] = rep.corrected[k];
    }
  });
}

double fp_report_condition(const fp_thermometry_report* r) {
  return r ? r->report.condition : 0.0;
}

double fp_report_max_corrected_error(const fp_thermometry_report* r) {
  return r ? r->report.max_corrected_error() : 0.0;
}

double fp_report_max_measured_error(const fp_thermometry_report* r) {
  return r ? r->report.max_measured_error() : 0.0;
}

fp_status fp_report_design_system(const fp_thermometry_report* r, fp_system* out) {
  return guarded([&] {
    require(r, "report");
    require(out, "out");
    *out = to_c(r->design);
  });
}

const fp_pulse* fp_report_pulse(const fp_thermometry_report* r, size_t index) {
  if (!r || index >= r->pulses.size()) return nullptr;
  return &r->pulses[index];
}

double fp_report_loss(const fp_thermometry_report* r, size_t index) {
  if (!r || index >= r->report.losses.size()) return 0.0;
  return r->report.losses[index];
}

fp_status fp_report_to_json(const fp_thermometry_report* r, char** out) {
  return guarded([&] {
    require(r, "report");
    require(out, "out");
    json j = to_json(r->report);
    j["design_system"] = to_json(r->design);
    *out = dup(j.dump(2));
  });
}

fp_status fp_report_to_csv(const fp_thermometry_report* r, char** out) {
  return guarded([&] {
    require(r, "report");
    require(out, "out");
    *out = dup(thermometry_csv(r->report));
  });
}

void fp_report_free(fp_thermometry_report* r) { delete r; }

void fp_sweep_spec_default(fp_sweep_spec* out) {
  if (!out) return;
  const SweepSpec s;
  *out = {FP_SWEEP_PHASE, -1, s.lower, s.upper, s.points, 0, 1, 1};
}

fp_status fp_sweep(const fp_system* system, const fp_pulse* pulse, const fp_sweep_spec* spec,
                   double* offsets, double* probabilities, int* clamped) {
  return guarded([&] {
    require(pulse, "pulse");
    require(spec, "spec");
    require(offsets, "offsets");
    require(probabilities, "probabilities");
    SweepSpec s;
    s.axis = spec->axis == FP_SWEEP_DURATION ? SweepAxis::duration_offset
                                             : SweepAxis::phase_offset;
    if (spec->which >= 0) s.which = static_cast<std::size_t>(spec->which);
    s.lower = spec->lower;
    s.upper = spec->upper;
    s.points = spec->points;
    Probe probe;
    probe.input_fock = spec->input_fock;
    if (spec->target_fock >= 0) {
      probe.target_fock = spec->target_fock;
    } else {
      probe.target_fock.reset();
    }
    const auto points = sweep(to_core(system), pulse->cp, s, probe, spec->threads);
    for (std::size_t i = 0; i < points.size(); ++i) {
      offsets[i] = points[i].offset;
      probabilities[i] = points[i].probability;
      if (clamped) clamped[i] = points[i].clamped ? 1 : 0;
    }
  });
}

fp_status fp_widest_window(const double* offsets, const double* probabilities, size_t n,
                           double threshold, int* found, double* lower, double* upper) {
  return guarded([&] {
    require(offsets, "offsets");
    require(probabilities, "probabilities");
    require(found, "found");
    std::vector<SweepPoint> points(n);
    for (size_t i = 0; i < n; ++i) points[i] = {offsets[i], probabilities[i], false};
    const auto w = widest_window(points, threshold);
    *found = w ? 1 : 0;
    if (w && lower) *lower = w->lower;
    if (w && upper) *upper = w->upper;
  });
}

fp_status fp_sweep_to_csv(const double* offsets, const double* probabilities, const int* clamped,
                          size_t n, char** out) {
  return guarded([&] {
    require(offsets, "offsets");
    require(probabilities, "probabilities");
    require(out, "out");
    std::vector<SweepPoint> points(n);
    for (size_t i = 0; i < n; ++i) {
      points[i] = {offsets[i], probabilities[i], clamped ? clamped[i] != 0 : false};
    }
    *out = dup(sweep_csv(points));
  });
}

}  // extern "C"
