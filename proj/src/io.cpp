#include "fockpulse/io.hpp"

#include "fockpulse/error.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

namespace fockpulse {

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) {
    throw Error(ErrorCode::config, where + " must be an object");
  }
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) {
      throw Error(ErrorCode::config, "unknown key '" + key + "' in " + where);
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config, where + "." + key + ": " + e.what());
  }
}

DistributionSpec distribution_from_json(const json& j) {
  check_keys(j, {"thermal_nbar", "populations"}, "thermometry.distribution");
  DistributionSpec d;
  d.thermal_nbar.reset();
  if (j.contains("thermal_nbar") == j.contains("populations")) {
    throw Error(ErrorCode::config,
                "thermometry.distribution needs exactly one of thermal_nbar or populations");
  }
  if (j.contains("thermal_nbar")) {
    double nbar = 0.0;
    read(j, "thermal_nbar", nbar, "thermometry.distribution");
    d.thermal_nbar = nbar;
  } else {
    read(j, "populations", d.populations, "thermometry.distribution");
  }
  return d;
}

}  // namespace

json to_json(const SystemConfig& cfg) {
  return {{"eta", cfg.eta},
          {"nu", cfg.nu},
          {"hbar", cfg.hbar},
          {"cutoff", cfg.cutoff},
          {"fock_offset", cfg.fock_offset}};
}

SystemConfig system_from_json(const json& j, SystemConfig defaults) {
  check_keys(j, {"eta", "nu", "hbar", "cutoff", "fock_offset"}, "system");
  read(j, "eta", defaults.eta, "system");
  read(j, "nu", defaults.nu, "system");
  read(j, "hbar", defaults.hbar, "system");
  read(j, "cutoff", defaults.cutoff, "system");
  read(j, "fock_offset", defaults.fock_offset, "system");
  defaults.validate();
  return defaults;
}

json to_json(const CompositePulse& cp) {
  json arr = json::array();
  for (const auto& p : canonicalized(cp).pulses) {
    arr.push_back({{"delta", p.delta}, {"omega", p.omega}, {"phi", p.phi}, {"t", p.t}});
  }
  return arr;
}

CompositePulse pulse_from_json(const json& j) {
  if (!j.is_array() || j.empty()) {
    throw Error(ErrorCode::config, "pulse must be a non-empty array");
  }
  CompositePulse cp;
  for (const auto& item : j) {
    check_keys(item, {"delta", "omega", "phi", "t"}, "pulse");
    PulseParams p;
    read(item, "delta", p.delta, "pulse");
    read(item, "omega", p.omega, "pulse");
    read(item, "phi", p.phi, "pulse");
    read(item, "t", p.t, "pulse");
    cp.pulses.push_back(p);
  }
  return canonicalized(cp);
}

ParamLayout RunConfig::layout() const {
  const auto n = static_cast<std::size_t>(pulse_count);
  return regime == Regime::strong
             ? strong_coupling_layout(system, n, omega, delta_lower, delta_upper)
             : weak_coupling_layout(system, n, omega);
}

CompositePulse RunConfig::pulse_template() const {
  return uniform_template(system, static_cast<std::size_t>(pulse_count), omega, delta);
}

ThermometryConfig RunConfig::thermometry_config() const {
  ThermometryConfig t;
  t.design = thermometry.pad ? padded_design_space(system, thermometry.window, *thermometry.pad)
                             : system;
  t.truth = system;
  t.truth.fock_offset = 0;
  t.truth.cutoff = thermometry.truth_cutoff;
  t.window = thermometry.window;
  t.pulse_count = static_cast<std::size_t>(thermometry.pulse_count);
  t.omega = omega;
  t.strong = regime == Regime::strong;
  t.optimizer = optimizer;
  t.optimizer.pso.seed = seeds.front();
  t.noise = ShotNoise{thermometry.shots, seeds.front()};
  t.threads = thermometry.threads;
  return t;
}

PhononDistribution RunConfig::distribution() const {
  const auto& d = thermometry.distribution;
  auto dist = d.thermal_nbar ? thermal_distribution(*d.thermal_nbar, thermometry.truth_cutoff)
                             : explicit_distribution(thermometry.truth_cutoff, d.populations);
  dist.validate(1e-6);
  return dist;
}

RunConfig run_config_from_json(const json& j) {
  check_keys(j,
             {"version", "system", "regime", "omega", "delta", "delta_bounds", "pulse_count",
              "target", "optimizer", "seeds", "output_dir", "max_loss", "thermometry"},
             "config");
  RunConfig cfg;
  read(j, "version", cfg.version, "config");
  if (cfg.version != kConfigVersion) {
    throw Error(ErrorCode::config, "unsupported config version " + std::to_string(cfg.version) +
                                       " (expected " + std::to_string(kConfigVersion) + ")");
  }
  if (j.contains("system")) cfg.system = system_from_json(j.at("system"));

  std::string regime = "weak";
  read(j, "regime", regime, "config");
  if (regime == "weak") {
    cfg.regime = Regime::weak;
  } else if (regime == "strong") {
    cfg.regime = Regime::strong;
    cfg.omega = 1.0;
  } else {
    throw Error(ErrorCode::config, "regime must be \"weak\" or \"strong\", got \"" + regime + "\"");
  }
  read(j, "omega", cfg.omega, "config");
  read(j, "delta", cfg.delta, "config");
  if (j.contains("delta_bounds")) {
    std::array<double, 2> b{};
    read(j, "delta_bounds", b, "config");
    cfg.delta_lower = b[0];
    cfg.delta_upper = b[1];
  }
  read(j, "pulse_count", cfg.pulse_count, "config");
  read(j, "target", cfg.target, "config");
  read(j, "seeds", cfg.seeds, "config");
  read(j, "output_dir", cfg.output_dir, "config");
  read(j, "max_loss", cfg.max_loss, "config");

  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    check_keys(o, {"pso", "refine", "starts", "refined"}, "optimizer");
    read(o, "starts", cfg.optimizer.starts, "optimizer");
    read(o, "refined", cfg.optimizer.refined, "optimizer");
    if (o.contains("pso")) {
      const auto& p = o.at("pso");
      check_keys(p, {"particles", "iterations", "inertia", "cognitive", "social", "threads"},
                 "optimizer.pso");
      auto& pso = cfg.optimizer.pso;
      read(p, "particles", pso.particles, "optimizer.pso");
      read(p, "iterations", pso.iterations, "optimizer.pso");
      read(p, "inertia", pso.inertia, "optimizer.pso");
      read(p, "cognitive", pso.cognitive, "optimizer.pso");
      read(p, "social", pso.social, "optimizer.pso");
      read(p, "threads", pso.threads, "optimizer.pso");
    }
    if (o.contains("refine")) {
      const auto& r = o.at("refine");
      check_keys(r, {"max_iters", "gradient_step", "tolerance", "memory"}, "optimizer.refine");
      auto& ref = cfg.optimizer.refine;
      read(r, "max_iters", ref.max_iters, "optimizer.refine");
      read(r, "gradient_step", ref.gradient_step, "optimizer.refine");
      read(r, "tolerance", ref.tolerance, "optimizer.refine");
      read(r, "memory", ref.memory, "optimizer.refine");
    }
  }

  if (j.contains("thermometry")) {
    const auto& t = j.at("thermometry");
    check_keys(t,
               {"truth_cutoff", "window", "distribution", "pad", "shots", "pulses",
                "pulse_count", "threads"},
               "thermometry");
    auto& th = cfg.thermometry;
    read(t, "truth_cutoff", th.truth_cutoff, "thermometry");
    read(t, "window", th.window, "thermometry");
    if (t.contains("distribution")) th.distribution = distribution_from_json(t.at("distribution"));
    if (t.contains("pad")) {
      int pad = 0;
      read(t, "pad", pad, "thermometry");
      th.pad = pad;
    }
    read(t, "shots", th.shots, "thermometry");
    read(t, "pulses", th.pulses, "thermometry");
    read(t, "threads", th.threads, "thermometry");
    read(t, "pulse_count", th.pulse_count, "thermometry");
  }

  if (cfg.pulse_count < 1 || cfg.thermometry.pulse_count < 1) {
    throw Error(ErrorCode::config, "pulse_count must be >= 1");
  }
  if (cfg.seeds.empty()) {
    throw Error(ErrorCode::config, "seeds must list at least one seed");
  }
  if (!(cfg.omega > 0.0)) {
    throw Error(ErrorCode::config, "omega must be positive");
  }
  if (!(cfg.delta_lower <= cfg.delta_upper)) {
    throw Error(ErrorCode::config, "delta_bounds must satisfy lower <= upper");
  }
  if (cfg.thermometry.window.empty()) {
    throw Error(ErrorCode::config, "thermometry.window is empty");
  }
  cfg.optimizer.validate();
  return cfg;
}

json to_json(const RunConfig& cfg) {
  const auto& o = cfg.optimizer;
  json dist = cfg.thermometry.distribution.thermal_nbar
                  ? json{{"thermal_nbar", *cfg.thermometry.distribution.thermal_nbar}}
                  : json{{"populations", cfg.thermometry.distribution.populations}};
  json th = {{"truth_cutoff", cfg.thermometry.truth_cutoff},
             {"window", cfg.thermometry.window},
             {"distribution", dist},
             {"shots", cfg.thermometry.shots},
             {"pulses", cfg.thermometry.pulses},
             {"pulse_count", cfg.thermometry.pulse_count},
             {"threads", cfg.thermometry.threads}};
  if (cfg.thermometry.pad) th["pad"] = *cfg.thermometry.pad;
  return {{"version", cfg.version},
          {"system", to_json(cfg.system)},
          {"regime", cfg.regime == Regime::strong ? "strong" : "weak"},
          {"omega", cfg.omega},
          {"delta", cfg.delta},
          {"delta_bounds", {cfg.delta_lower, cfg.delta_upper}},
          {"pulse_count", cfg.pulse_count},
          {"target", cfg.target},
          {"optimizer",
           {{"pso",
             {{"particles", o.pso.particles},
              {"iterations", o.pso.iterations},
              {"inertia", o.pso.inertia},
              {"cognitive", o.pso.cognitive},
              {"social", o.pso.social},
              {"threads", o.pso.threads}}},
            {"refine",
             {{"max_iters", o.refine.max_iters},
              {"gradient_step", o.refine.gradient_step},
              {"tolerance", o.refine.tolerance},
              {"memory", o.refine.memory}}},
            {"starts", o.starts},
            {"refined", o.refined}}},
          {"seeds", cfg.seeds},
          {"output_dir", cfg.output_dir},
          {"max_loss", cfg.max_loss},
          {"thermometry", th}};
}

std::string content_id(const SystemConfig& system, const std::string& target,
                       const CompositePulse& pulse) {
  const json key = {{"system", to_json(system)}, {"target", target}, {"pulse", to_json(pulse)}};
  const std::string text = key.dump();
  // FNV-1a, 64 bit
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

LibraryEntry make_library_entry(const SystemConfig& system, const std::string& target,
                                const CompositePulse& pulse, double loss, json provenance) {
  LibraryEntry e;
  e.system = system;
  e.target = target;
  e.pulse = canonicalized(pulse);
  e.id = content_id(system, target, e.pulse);
  e.loss = loss;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  e.created = buf;
  e.provenance = std::move(provenance);
  return e;
}

json to_json(const LibraryEntry& e) {
  return {{"id", e.id},
          {"system", to_json(e.system)},
          {"target", e.target},
          {"pulse", to_json(e.pulse)},
          {"loss", e.loss},
          {"created", e.created},
          {"provenance", e.provenance}};
}

LibraryEntry library_entry_from_json(const json& j) {
  check_keys(j, {"id", "system", "target", "pulse", "loss", "created", "provenance"},
             "library entry");
  for (const char* key : {"system", "target", "pulse"}) {
    if (!j.contains(key)) {
      throw Error(ErrorCode::config, std::string("library entry is missing '") + key + "'");
    }
  }
  LibraryEntry e;
  e.system = system_from_json(j.at("system"));
  read(j, "target", e.target, "library entry");
  e.pulse = pulse_from_json(j.at("pulse"));
  read(j, "loss", e.loss, "library entry");
  read(j, "created", e.created, "library entry");
  if (j.contains("provenance")) e.provenance = j.at("provenance");
  e.id = content_id(e.system, e.target, e.pulse);
  std::string stored;
  read(j, "id", stored, "library entry");
  if (!stored.empty() && stored != e.id) {
    throw Error(ErrorCode::config,
                "library entry id " + stored + " does not match its content (" + e.id + ")");
  }
  return e;
}

std::filesystem::path save_library_entry(const LibraryEntry& e, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::io, "cannot create " + dir.string() + ": " + ec.message());
  }
  const auto path = dir / (e.id + ".json");
  write_text_file(path, to_json(e).dump(2) + "\n");
  return path;
}

LibraryEntry load_library_entry(const std::filesystem::path& dir, const std::string& ref) {
  std::filesystem::path path = ref;
  if (!std::filesystem::is_regular_file(path)) path = dir / (ref + ".json");
  if (!std::filesystem::is_regular_file(path)) {
    throw Error(ErrorCode::config, "unknown pulse '" + ref + "' (looked in " + dir.string() + ")");
  }
  return library_entry_from_json(read_json_file(path));
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::config, "cannot open " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    throw Error(ErrorCode::io, "cannot write " + path.string());
  }
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json to_json(const ThermometryReport& r) {
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.begin(), v.end()); };
  json coeff = json::array();
  for (Eigen::Index i = 0; i < r.coeff.rows(); ++i) coeff.push_back(vec(r.coeff.row(i)));
  json pulses = json::array();
  for (const auto& p : r.pulses) pulses.push_back(to_json(p));
  json profiles = json::array();
  for (const auto& p : r.profiles) profiles.push_back(vec(p));
  return {{"window", r.window},
          {"P", vec(r.truth)},
          {"M", vec(r.measured)},
          {"R", vec(r.corrected)},
          {"coefficients", coeff},
          {"condition", r.condition},
          {"max_abs_R_minus_P", r.max_corrected_error()},
          {"max_abs_M_minus_P", r.max_measured_error()},
          {"pulses", pulses},
          {"losses", r.losses},
          {"profiles", profiles}};
}

std::string thermometry_csv(const ThermometryReport& r) {
  std::ostringstream out;
  out << "n,P,M,R\n";
  for (std::size_t i = 0; i < r.window.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out << r.window[i] << ',' << format_number(r.truth[k]) << ','
        << format_number(r.measured[k]) << ',' << format_number(r.corrected[k]) << '\n';
  }
  return out.str();
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::ostringstream out;
  out << "offset,probability,clamped\n";
  for (const auto& p : points) {
    out << format_number(p.offset) << ',' << format_number(p.probability) << ','
        << (p.clamped ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace fockpulse
