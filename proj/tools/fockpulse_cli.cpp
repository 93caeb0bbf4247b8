// fockpulse command-line front end. Talks to the library only through the
// C interface in fockpulse.h.
#include "fockpulse/fockpulse.h"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitOptimization = 3;
constexpr int kExitIllConditioned = 4;

struct Failure {
  int code;
  std::string message;
};

int exit_code_for(fp_status s) {
  switch (s) {
    case FP_OK: return 0;
    case FP_ERR_ILL_CONDITIONED: return kExitIllConditioned;
    case FP_ERR_OPTIMIZATION:
    case FP_ERR_NUMERICAL: return kExitOptimization;
    case FP_ERR_INTERNAL: return 1;
    default: return kExitInput;
  }
}

void check(fp_status s, const std::string& context = {}) {
  if (s == FP_OK) return;
  std::string msg = context.empty() ? "" : context + ": ";
  msg += fp_last_error();
  if (s == FP_ERR_ILL_CONDITIONED) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " (condition number %.6g)", fp_last_condition());
    msg += buf;
  }
  throw Failure{exit_code_for(s), msg};
}

struct StringDeleter {
  void operator()(char* s) const { fp_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

std::string take(char* s) {
  OwnedString owned(s);
  return owned ? std::string(owned.get()) : std::string();
}

struct PulseDeleter {
  void operator()(fp_pulse* p) const { fp_pulse_free(p); }
};
struct ConfigDeleter {
  void operator()(fp_config* c) const { fp_config_free(c); }
};
struct DesignDeleter {
  void operator()(fp_design_result* r) const { fp_design_result_free(r); }
};
struct ReportDeleter {
  void operator()(fp_thermometry_report* r) const { fp_report_free(r); }
};
using Pulse = std::unique_ptr<fp_pulse, PulseDeleter>;
using Config = std::unique_ptr<fp_config, ConfigDeleter>;

std::string num17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Failure{kExitInput, "cannot write " + path.string()};
}

// Options shared by every subcommand.
struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> cutoff;
  std::optional<std::string> out;
  std::string format;
  bool quiet = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "Run configuration (JSON)");
  sub->add_option("--seed", c.seed, "Use this single seed instead of the configured list");
  sub->add_option("--cutoff", c.cutoff, "Override the Fock cutoff of the design space");
  sub->add_option("--out", c.out, "Output directory (library lives in <out>/library)");
  sub->add_option("--format", c.format, "Print machine-readable output instead of tables")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_flag("-q,--quiet", c.quiet, "Suppress progress on stderr");
}

Config load_config(const Common& c) {
  fp_config* raw = nullptr;
  check(fp_config_load(c.config.c_str(), &raw));
  Config cfg(raw);
  if (c.seed) check(fp_config_set_seed(cfg.get(), *c.seed), "--seed");
  if (c.cutoff) check(fp_config_set_cutoff(cfg.get(), *c.cutoff), "--cutoff");
  if (c.out) check(fp_config_set_output_dir(cfg.get(), c.out->c_str()), "--out");
  return cfg;
}

void progress_printer(const char* stage, int start, int iteration, double best, void*) {
  if (iteration % 50 != 0) return;
  std::fprintf(stderr, "[%s %d] iteration %d best loss %.6g\n", stage, start, iteration, best);
}

std::vector<std::string> basis_labels(const fp_system& s) {
  std::vector<std::string> out;
  for (const char* manifold : {"g", "e"}) {
    for (int k = 0; k < s.cutoff; ++k) out.push_back(manifold + std::to_string(s.fock_offset + k));
  }
  return out;
}

std::string matrix_table(const fp_system& s, const std::vector<double>& m) {
  const auto labels = basis_labels(s);
  const auto dim = labels.size();
  std::ostringstream out;
  out << "      ";
  for (const auto& l : labels) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%7s", l.c_str());
    out << buf;
  }
  out << '\n';
  for (std::size_t i = 0; i < dim; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%-6s", labels[i].c_str());
    out << buf;
    for (std::size_t j = 0; j < dim; ++j) {
      std::snprintf(buf, sizeof buf, "%7s", fixed(m[i * dim + j]).c_str());
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

std::string parameter_table(const fp_pulse* p) {
  std::ostringstream out;
  out << "  k       delta       omega         phi           t\n";
  for (std::size_t k = 0; k < fp_pulse_size(p); ++k) {
    fp_pulse_params q{};
    check(fp_pulse_get(p, k, &q));
    char buf[128];
    std::snprintf(buf, sizeof buf, "%3zu %11.6f %11.6f %11.6f %11.4f\n", k + 1, q.delta,
                  q.omega, q.phi, q.t);
    out << buf;
  }
  return out.str();
}

std::string pulse_json(const fp_pulse* p) {
  std::ostringstream out;
  out << '[';
  for (std::size_t k = 0; k < fp_pulse_size(p); ++k) {
    fp_pulse_params q{};
    check(fp_pulse_get(p, k, &q));
    out << (k ? "," : "") << "{\"delta\":" << num17(q.delta) << ",\"omega\":" << num17(q.omega)
        << ",\"phi\":" << num17(q.phi) << ",\"t\":" << num17(q.t) << '}';
  }
  out << ']';
  return out.str();
}

std::string vector_json(const std::vector<double>& v) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << num17(v[i]);
  out << ']';
  return out.str();
}

std::string matrix_json(const std::vector<double>& m, std::size_t dim) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < dim; ++i) {
    out << (i ? "," : "")
        << vector_json(std::vector<double>(m.begin() + i * dim, m.begin() + (i + 1) * dim));
  }
  out << ']';
  return out.str();
}

std::string matrix_csv(const fp_system& s, const std::vector<double>& m) {
  const auto labels = basis_labels(s);
  const auto dim = labels.size();
  std::ostringstream out;
  out << "row";
  for (const auto& l : labels) out << ',' << l;
  out << '\n';
  for (std::size_t i = 0; i < dim; ++i) {
    out << labels[i];
    for (std::size_t j = 0; j < dim; ++j) out << ',' << num17(m[i * dim + j]);
    out << '\n';
  }
  return out.str();
}

std::vector<double> modulus(const fp_system& s, const fp_pulse* p) {
  const auto dim = static_cast<std::size_t>(2 * s.cutoff);
  std::vector<double> m(dim * dim);
  check(fp_modulus_matrix(&s, p, m.data()));
  return m;
}

std::vector<double> profile(const fp_system& s, const fp_pulse* p) {
  std::vector<double> v(static_cast<std::size_t>(s.cutoff));
  check(fp_excitation_profile(&s, p, v.data()));
  return v;
}

std::string profile_table(const fp_system& s, const std::vector<double>& v) {
  std::ostringstream out;
  out << "excitation profile (n: P(|g,n> -> e))\n";
  for (std::size_t k = 0; k < v.size(); ++k) {
    out << "  " << s.fock_offset + static_cast<int>(k) << ": " << fixed(v[k]) << '\n';
  }
  return out.str();
}

// ---- design ----

int cmd_design(const Common& c) {
  auto cfg = load_config(c);
  fp_system sys{};
  check(fp_config_get_system(cfg.get(), &sys));
  const std::string target = take([&] {
    char* s = nullptr;
    check(fp_config_target(cfg.get(), &s));
    return s;
  }());

  fp_design_result* raw = nullptr;
  check(fp_design(cfg.get(), c.quiet ? nullptr : progress_printer, nullptr, &raw), "design");
  std::unique_ptr<fp_design_result, DesignDeleter> result(raw);
  const fp_pulse* pulse = fp_design_pulse(result.get());
  const double loss = fp_design_loss(result.get());

  char* libdir = nullptr;
  check(fp_config_library_dir(cfg.get(), &libdir));
  const std::string lib = take(libdir);
  const std::string provenance = take([&] {
    char* s = nullptr;
    check(fp_config_to_json(cfg.get(), &s));
    return s;
  }());
  char* id_raw = nullptr;
  char* path_raw = nullptr;
  check(fp_library_save(lib.c_str(), &sys, target.c_str(), pulse, loss, provenance.c_str(),
                        &id_raw, &path_raw),
        "library");
  const std::string id = take(id_raw);
  const std::string path = take(path_raw);

  const auto m = modulus(sys, pulse);
  const auto prof = profile(sys, pulse);
  if (c.format == "json") {
    std::printf(
        "{\"id\":\"%s\",\"target\":\"%s\",\"loss\":%s,\"seed\":%llu,\"pulse\":%s,"
        "\"modulus\":%s,\"profile\":%s}\n",
        id.c_str(), target.c_str(), num17(loss).c_str(),
        static_cast<unsigned long long>(fp_design_seed(result.get())), pulse_json(pulse).c_str(),
        matrix_json(m, 2 * static_cast<std::size_t>(sys.cutoff)).c_str(),
        vector_json(prof).c_str());
  } else if (c.format == "csv") {
    std::printf("%s", matrix_csv(sys, m).c_str());
  } else {
    std::printf("target %s  loss %.6g  seed %llu  evaluations %zu\n", target.c_str(), loss,
                static_cast<unsigned long long>(fp_design_seed(result.get())),
                fp_design_evaluations(result.get()));
    std::printf("\n|U|\n%s\nparameters\n%s\n%s", matrix_table(sys, m).c_str(),
                parameter_table(pulse).c_str(), profile_table(sys, prof).c_str());
    std::printf("\nsaved %s\n", path.c_str());
  }
  if (loss > fp_config_max_loss(cfg.get())) {
    std::fprintf(stderr, "error: loss %.6g exceeds max_loss %.6g\n", loss,
                 fp_config_max_loss(cfg.get()));
    return kExitOptimization;
  }
  return 0;
}

// ---- pulse lookup for evaluate / robustness ----

struct LoadedPulse {
  Pulse pulse;
  fp_system system{};
  std::string target;
  std::string id;
};

LoadedPulse resolve_pulse(const Common& c, const Config& cfg, const std::string& ref,
                          bool analytic) {
  LoadedPulse out;
  if (analytic) {
    check(fp_config_get_system(cfg.get(), &out.system));
    fp_pulse* p = nullptr;
    check(fp_pulse_analytic_swap(&out.system, fp_config_omega(cfg.get()), &p));
    out.pulse.reset(p);
    out.target = "swap(" + std::to_string(out.system.fock_offset) + ")";
    out.id = "analytic-swap";
    return out;
  }
  if (ref.empty()) throw Failure{kExitInput, "give a pulse id or file, or --analytic-swap"};
  const std::string lib = take([&] {
    char* s = nullptr;
    check(fp_config_library_dir(cfg.get(), &s));
    return s;
  }());
  fp_pulse* p = nullptr;
  char* target = nullptr;
  char* id = nullptr;
  check(fp_library_load(lib.c_str(), ref.c_str(), &p, &out.system, &target, &id, nullptr));
  out.pulse.reset(p);
  out.target = take(target);
  out.id = take(id);
  if (c.cutoff) out.system.cutoff = *c.cutoff;
  return out;
}

// ---- evaluate ----

int cmd_evaluate(const Common& c, const std::string& ref, bool analytic) {
  auto cfg = load_config(c);
  auto lp = resolve_pulse(c, cfg, ref, analytic);
  const auto& sys = lp.system;
  const auto m = modulus(sys, lp.pulse.get());
  const auto prof = profile(sys, lp.pulse.get());
  std::optional<double> loss;
  {
    double l = 0.0;
    if (fp_target_loss(&sys, lp.pulse.get(), lp.target.c_str(), &l) == FP_OK) loss = l;
  }
  const auto dim = 2 * static_cast<std::size_t>(sys.cutoff);

  if (c.format == "json") {
    std::printf(
        "{\"id\":\"%s\",\"target\":\"%s\",\"cutoff\":%d,\"fock_offset\":%d,\"loss\":%s,"
        "\"pulse\":%s,\"modulus\":%s,\"profile\":%s}\n",
        lp.id.c_str(), lp.target.c_str(), sys.cutoff, sys.fock_offset,
        loss ? num17(*loss).c_str() : "null", pulse_json(lp.pulse.get()).c_str(),
        matrix_json(m, dim).c_str(), vector_json(prof).c_str());
    return 0;
  }
  if (c.format == "csv") {
    std::printf("%s", matrix_csv(sys, m).c_str());
    return 0;
  }
  std::printf("pulse %s  target %s  cutoff %d", lp.id.c_str(), lp.target.c_str(), sys.cutoff);
  if (sys.fock_offset) std::printf("  fock offset %d", sys.fock_offset);
  if (loss) std::printf("  loss %.6g", *loss);
  std::printf("\n\nparameters\n%s\n", parameter_table(lp.pulse.get()).c_str());
  if (sys.cutoff <= 12) {
    std::printf("|U|\n%s\n", matrix_table(sys, m).c_str());
  } else {
    std::printf("|U| omitted for cutoff > 12 (use --format csv)\n\n");
  }
  std::printf("%s", profile_table(sys, prof).c_str());
  return 0;
}

// ---- thermometry ----

int cmd_thermometry(const Common& c) {
  auto cfg = load_config(c);
  fp_thermometry_report* raw = nullptr;
  check(fp_thermometry_run(cfg.get(), c.quiet ? nullptr : progress_printer, nullptr, &raw),
        "thermometry");
  std::unique_ptr<fp_thermometry_report, ReportDeleter> report(raw);

  const std::string out_dir = take([&] {
    char* s = nullptr;
    check(fp_config_output_dir(cfg.get(), &s));
    return s;
  }());
  const std::string lib = take([&] {
    char* s = nullptr;
    check(fp_config_library_dir(cfg.get(), &s));
    return s;
  }());
  const std::string json_text = take([&] {
    char* s = nullptr;
    check(fp_report_to_json(report.get(), &s));
    return s;
  }());
  const std::string csv_text = take([&] {
    char* s = nullptr;
    check(fp_report_to_csv(report.get(), &s));
    return s;
  }());
  const fs::path json_path = fs::path(out_dir) / "thermometry.json";
  const fs::path csv_path = fs::path(out_dir) / "thermometry.csv";
  write_file(json_path, json_text + "\n");
  write_file(csv_path, csv_text);

  const std::size_t k = fp_report_window_size(report.get());
  std::vector<int> window(k);
  std::vector<double> p(k), m(k), r(k);
  check(fp_report_vectors(report.get(), window.data(), p.data(), m.data(), r.data()));

  fp_system design{};
  check(fp_report_design_system(report.get(), &design));
  const std::string provenance = take([&] {
    char* s = nullptr;
    check(fp_config_to_json(cfg.get(), &s));
    return s;
  }());
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < k; ++i) {
    const std::string target = "shelve(" + std::to_string(window[i]) + ")";
    char* id = nullptr;
    check(fp_library_save(lib.c_str(), &design, target.c_str(), fp_report_pulse(report.get(), i),
                          fp_report_loss(report.get(), i), provenance.c_str(), &id, nullptr),
          "library");
    ids.push_back(take(id));
  }

  if (c.format == "json") {
    std::printf("%s\n", json_text.c_str());
  } else if (c.format == "csv") {
    std::printf("%s", csv_text.c_str());
  } else {
    std::printf("%6s %8s %8s %8s   pulse\n", "n", "P", "M", "R");
    for (std::size_t i = 0; i < k; ++i) {
      std::printf("%6d %8s %8s %8s   %s\n", window[i], fixed(p[i]).c_str(), fixed(m[i]).c_str(),
                  fixed(r[i]).c_str(), ids[i].c_str());
    }
    std::printf("\nmax |R - P| = %s\nmax |M - P| = %s\ncondition number %.4g\n",
                fixed(fp_report_max_corrected_error(report.get()), 4).c_str(),
                fixed(fp_report_max_measured_error(report.get()), 4).c_str(),
                fp_report_condition(report.get()));
    std::printf("wrote %s and %s\n", csv_path.string().c_str(), json_path.string().c_str());
  }
  return 0;
}

// ---- robustness ----

struct SweepArgs {
  std::string axis = "phase";
  double lower = -1.5707963267948966;
  double upper = 1.5707963267948966;
  int points = 41;
  int pulse_index = -1;
  int input = 0;
  int target = 1;
  double threshold = 0.99;
  int threads = 0;
};

int cmd_robustness(const Common& c, const std::string& ref, bool analytic, const SweepArgs& a) {
  auto cfg = load_config(c);
  auto lp = resolve_pulse(c, cfg, ref, analytic);
  fp_sweep_spec spec{};
  fp_sweep_spec_default(&spec);
  spec.axis = a.axis == "duration" ? FP_SWEEP_DURATION : FP_SWEEP_PHASE;
  spec.which = a.pulse_index;
  spec.lower = a.lower;
  spec.upper = a.upper;
  spec.points = a.points;
  spec.input_fock = a.input;
  spec.target_fock = a.target;
  spec.threads = a.threads;
  if (spec.points < 1) throw Failure{kExitInput, "--points must be >= 3"};
  const auto n = static_cast<std::size_t>(spec.points);
  std::vector<double> offsets(n), probs(n);
  std::vector<int> clamped(n);
  check(fp_sweep(&lp.system, lp.pulse.get(), &spec, offsets.data(), probs.data(), clamped.data()),
        "sweep");
  const std::string csv = take([&] {
    char* s = nullptr;
    check(fp_sweep_to_csv(offsets.data(), probs.data(), clamped.data(), n, &s));
    return s;
  }());
  int found = 0;
  double lo = 0.0, hi = 0.0;
  check(fp_widest_window(offsets.data(), probs.data(), n, a.threshold, &found, &lo, &hi));

  const std::string out_dir = take([&] {
    char* s = nullptr;
    check(fp_config_output_dir(cfg.get(), &s));
    return s;
  }());
  const fs::path csv_path = fs::path(out_dir) / ("robustness-" + a.axis + ".csv");
  write_file(csv_path, csv);

  std::size_t clamp_count = 0;
  for (int v : clamped) clamp_count += v ? 1 : 0;
  if (clamp_count) {
    std::fprintf(stderr, "warning: %zu samples had negative durations clamped to 0\n",
                 clamp_count);
  }
  if (c.format == "csv") {
    std::printf("%s", csv.c_str());
    return 0;
  }
  if (c.format == "json") {
    std::printf(
        "{\"pulse\":\"%s\",\"axis\":\"%s\",\"threshold\":%s,\"window\":%s,"
        "\"time_units_per_microsecond\":%s,\"offsets\":%s,\"probabilities\":%s}\n",
        lp.id.c_str(), a.axis.c_str(), num17(a.threshold).c_str(),
        found ? ("[" + num17(lo) + "," + num17(hi) + "]").c_str() : "null",
        num17(fp_time_units_per_microsecond()).c_str(), vector_json(offsets).c_str(),
        vector_json(probs).c_str());
    return 0;
  }
  std::printf("pulse %s  axis %s  %zu points  wrote %s\n", lp.id.c_str(), a.axis.c_str(), n,
              csv_path.string().c_str());
  if (a.axis == "duration") {
    std::printf("offsets in dimensionless time; 1 us = %.10g units\n",
                fp_time_units_per_microsecond());
  }
  if (found) {
    std::printf("probability >= %s on [%s, %s]\n", fixed(a.threshold, 2).c_str(),
                fixed(lo, 4).c_str(), fixed(hi, 4).c_str());
  } else {
    std::printf("probability < %s already at offset 0\n", fixed(a.threshold, 2).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fock-state-selective composite pulse design and phonon thermometry"};
  app.require_subcommand(1);

  Common design_opts, eval_opts, thermo_opts, robust_opts;

  auto* design = app.add_subcommand("design", "Optimise a composite pulse for the configured "
                                              "target and store it in the pulse library.\n"
                                              "--format csv prints |U| with columns "
                                              "row,g<n>...,e<n>...");
  add_common(design, design_opts);
  design->add_option("config_path", design_opts.config, "Same as --config");

  std::string eval_ref;
  bool eval_analytic = false;
  auto* evaluate = app.add_subcommand(
      "evaluate", "Re-evaluate a stored pulse, optionally at another cutoff.\n"
                  "--format csv prints |U| with columns row,g<n>...,e<n>...");
  add_common(evaluate, eval_opts);
  evaluate->add_option("pulse", eval_ref, "Library id or path to an entry file");
  evaluate->add_flag("--analytic-swap", eval_analytic,
                     "Evaluate the analytic three-pulse SWAP instead of a stored pulse");

  auto* thermo = app.add_subcommand(
      "thermometry", "Design shelving pulses for the window, simulate readout and correct it.\n"
                     "Writes thermometry.csv (columns n,P,M,R) and thermometry.json.");
  add_common(thermo, thermo_opts);
  thermo->add_option("config_path", thermo_opts.config, "Same as --config");

  std::string robust_ref;
  bool robust_analytic = false;
  SweepArgs sweep_args;
  auto* robust = app.add_subcommand(
      "robustness", "Sweep duration or phase offsets around a stored pulse.\n"
                    "Writes robustness-<axis>.csv with columns offset,probability,clamped.");
  add_common(robust, robust_opts);
  robust->add_option("pulse", robust_ref, "Library id or path to an entry file");
  robust->add_flag("--analytic-swap", robust_analytic, "Sweep the analytic SWAP");
  robust->add_option("--axis", sweep_args.axis, "duration or phase")
      ->check(CLI::IsMember({"duration", "phase"}));
  robust->add_option("--lower", sweep_args.lower, "Lowest offset");
  robust->add_option("--upper", sweep_args.upper, "Highest offset");
  robust->add_option("--points", sweep_args.points, "Sample count (>= 3)");
  robust->add_option("--pulse-index", sweep_args.pulse_index,
                     "Perturb only this pulse (0-based); default every pulse");
  robust->add_option("--input", sweep_args.input, "Input Fock state |g,n>");
  robust->add_option("--target-fock", sweep_args.target,
                     "Probe |e,m>; -1 probes total excitation");
  robust->add_option("--threshold", sweep_args.threshold, "Window threshold");
  robust->add_option("--threads", sweep_args.threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*design) return cmd_design(design_opts);
    if (*evaluate) return cmd_evaluate(eval_opts, eval_ref, eval_analytic);
    if (*thermo) return cmd_thermometry(thermo_opts);
    if (*robust) return cmd_robustness(robust_opts, robust_ref, robust_analytic, sweep_args);
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", f.message.c_str());
    return f.code;
  }
  return 0;
}
