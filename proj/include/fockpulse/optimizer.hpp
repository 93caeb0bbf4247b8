#pragma once

#include "fockpulse/objective.hpp"
#include "fockpulse/pulses.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fockpulse {

struct PsoConfig {
  int particles = 64;
  int iterations = 300;
  double inertia = 0.729;
  double cognitive = 1.49445;
  double social = 1.49445;
  std::uint64_t seed = 1;
  // Worker threads for particle evaluation; 0 picks the hardware count.
  // Results do not depend on this value.
  int threads = 0;

  void validate() const;
};

struct RefineConfig {
  int max_iters = 500;
  double gradient_step = 1e-6;
  // Stop once an iteration improves the loss by less than this.
  double tolerance = 1e-12;
  int memory = 8;

  void validate() const;
};

// Multi-start pipeline: `starts` independent swarms (seeds seed, seed+1, ...),
// the best `refined` of them polished by refine.
struct DesignConfig {
  PsoConfig pso;
  RefineConfig refine;
  int starts = 4;
  int refined = 2;

  void validate() const;
};

struct HistoryPoint {
  int iteration = 0;
  double loss = 0.0;
};

struct ProgressEvent {
  const char* stage = "";  // "pso" or "refine"
  int start = 0;
  int iteration = 0;
  double best_loss = 0.0;
};

using ProgressCallback = std::function<void(const ProgressEvent&)>;

// Box-constrained scalar objective over a plain parameter vector.
using Objective = std::function<double(std::span<const double>)>;

struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t size() const { return lower.size(); }
  void validate() const;
  bool contains(std::span<const double> x) const;
};

struct VectorResult {
  std::vector<double> x;
  double loss = 0.0;
  std::vector<HistoryPoint> history;
  std::size_t evaluations = 0;
};

VectorResult pso_minimize(const Objective& f, const Box& box, const PsoConfig& cfg,
                          const ProgressCallback& progress = {}, int start_index = 0);

// Projected limited-memory BFGS with central finite-difference gradients.
// `names` labels coordinates in error messages and may be empty.
VectorResult refine_minimize(const Objective& f, const Box& box, std::vector<double> start,
                             const RefineConfig& cfg, const ProgressCallback& progress = {},
                             const std::vector<std::string>& names = {}, int start_index = 0);

// Central differences where the stencil fits inside the box, one-sided at
// the faces. Throws Error(numerical) naming the first non-finite component.
std::vector<double> finite_difference_gradient(const Objective& f, std::span<const double> x,
                                               double fx, const Box& box, double step,
                                               const std::vector<std::string>& names = {});

struct OptimizationResult {
  CompositePulse best;
  double loss = 0.0;
  std::vector<HistoryPoint> history;
  std::size_t evaluations = 0;
};

// Loss of the pulse obtained by writing `x` into `tmpl` through `layout`.
Objective pulse_objective(const SystemConfig& cfg, const CompositePulse& tmpl,
                          const ParamLayout& layout, const TargetSpec& spec);

std::vector<std::string> layout_names(const ParamLayout& layout);

OptimizationResult pso_search(const SystemConfig& cfg, const CompositePulse& tmpl,
                              const ParamLayout& layout, const TargetSpec& spec,
                              const PsoConfig& pcfg, const ProgressCallback& progress = {});

OptimizationResult refine(const SystemConfig& cfg, const CompositePulse& start,
                          const ParamLayout& layout, const TargetSpec& spec,
                          const RefineConfig& rcfg, const ProgressCallback& progress = {});

OptimizationResult design_pulse(const SystemConfig& cfg, const CompositePulse& tmpl,
                                const ParamLayout& layout, const TargetSpec& spec,
                                const DesignConfig& dcfg, const ProgressCallback& progress = {});

}  // namespace fockpulse
