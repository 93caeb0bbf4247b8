#pragma once

#include "fockpulse/optimizer.hpp"
#include "fockpulse/robustness.hpp"
#include "fockpulse/thermometry.hpp"

#include <json.hpp>

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fockpulse {

using json = nlohmann::json;

inline constexpr int kConfigVersion = 1;

enum class Regime { weak, strong };

struct DistributionSpec {
  std::optional<double> thermal_nbar;
  std::vector<std::pair<int, double>> populations;
};

struct ThermometrySection {
  int truth_cutoff = 100;
  std::vector<int> window{0, 1, 2, 3};
  DistributionSpec distribution{1.0, {}};
  // When set, the design space is the window padded by this many levels on
  // each side instead of `system`.
  std::optional<int> pad;
  std::uint64_t shots = 0;
  int pulse_count = 6;
  // Concurrent pulse designs; 0 picks the hardware count.
  int threads = 0;
  // Library ids (or files) of predesigned pulses, one per window state.
  std::vector<std::string> pulses;
};

// Everything one CLI run needs. Missing keys take the defaults below, which
// are the weak-coupling settings (eta 0.084, nu 1, omega 0.1, delta 1,
// t in [0, 4 pi/(eta omega)], phi in [0, 2 pi]).
struct RunConfig {
  int version = kConfigVersion;
  SystemConfig system;
  Regime regime = Regime::weak;
  double omega = 0.1;
  double delta = 1.0;
  double delta_lower = 0.25;
  double delta_upper = 2.5;
  int pulse_count = 3;
  std::string target = "shelve(0)";
  DesignConfig optimizer;
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir = "out";
  // Designs whose loss exceeds this count as failed.
  double max_loss = 1.0;
  ThermometrySection thermometry;

  ParamLayout layout() const;
  CompositePulse pulse_template() const;
  ThermometryConfig thermometry_config() const;
  PhononDistribution distribution() const;
};

// Throws Error(config) naming the offending key.
RunConfig run_config_from_json(const json& j);
json to_json(const RunConfig& cfg);

json to_json(const SystemConfig& cfg);
SystemConfig system_from_json(const json& j, SystemConfig defaults = {});

json to_json(const CompositePulse& cp);
CompositePulse pulse_from_json(const json& j);

// Stored pulse with the context it was designed for.
struct LibraryEntry {
  std::string id;
  SystemConfig system;
  std::string target;
  CompositePulse pulse;
  double loss = 0.0;
  std::string created;
  json provenance;
};

// Hex digest over the canonical serialisation of (system, target, pulse).
std::string content_id(const SystemConfig& system, const std::string& target,
                       const CompositePulse& pulse);

LibraryEntry make_library_entry(const SystemConfig& system, const std::string& target,
                                const CompositePulse& pulse, double loss, json provenance);
json to_json(const LibraryEntry& e);
LibraryEntry library_entry_from_json(const json& j);

// Writes <dir>/<id>.json and returns its path.
std::filesystem::path save_library_entry(const LibraryEntry& e, const std::filesystem::path& dir);
// Accepts an id (looked up in dir) or a path to an entry file.
LibraryEntry load_library_entry(const std::filesystem::path& dir, const std::string& ref);

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// 17 significant digits, enough to round-trip a double.
std::string format_number(double v);

json to_json(const ThermometryReport& r);
// Columns: n,P,M,R
std::string thermometry_csv(const ThermometryReport& r);
// Columns: offset,probability,clamped
std::string sweep_csv(const std::vector<SweepPoint>& points);

}  // namespace fockpulse
