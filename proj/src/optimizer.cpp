#include "fockpulse/optimizer.hpp"

#include "fockpulse/error.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace fockpulse {

void PsoConfig::validate() const {
  if (particles < 8) {
    throw Error(ErrorCode::config, "PSO needs at least 8 particles");
  }
  if (iterations < 0) {
    throw Error(ErrorCode::config, "PSO iterations must be >= 0");
  }
  if (!(inertia > 0.0) || !(cognitive > 0.0) || !(social > 0.0)) {
    throw Error(ErrorCode::config, "PSO coefficients must be positive");
  }
}

void RefineConfig::validate() const {
  if (max_iters < 0) {
    throw Error(ErrorCode::config, "refine max_iters must be >= 0");
  }
  if (!(gradient_step > 0.0) || gradient_step > 1e-3) {
    throw Error(ErrorCode::config, "gradient_step must lie in (0, 1e-3]");
  }
  if (!(tolerance > 0.0)) {
    throw Error(ErrorCode::config, "refine tolerance must be positive");
  }
  if (memory < 1) {
    throw Error(ErrorCode::config, "refine memory must be >= 1");
  }
}

void DesignConfig::validate() const {
  pso.validate();
  refine.validate();
  if (starts < 1 || refined < 1) {
    throw Error(ErrorCode::config, "design needs starts >= 1 and refined >= 1");
  }
  if (refined > starts) {
    throw Error(ErrorCode::config, "design cannot refine more swarms than it starts");
  }
}

void Box::validate() const {
  if (lower.size() != upper.size()) {
    throw Error(ErrorCode::layout, "bound vectors differ in length");
  }
  if (lower.empty()) {
    throw Error(ErrorCode::config, "nothing to optimise: no free parameters");
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || lower[i] > upper[i]) {
      throw Error(ErrorCode::layout, "bounds of coordinate " + std::to_string(i) +
                                         " must be finite with lower <= upper");
    }
  }
}

bool Box::contains(std::span<const double> x) const {
  if (x.size() != lower.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
  }
  return true;
}

namespace {

// Platform-independent uniform draw in [0, 1).
struct Uniform {
  std::mt19937_64 engine;
  double operator()() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }
};

double sanitize(double v) {
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

std::string coordinate_name(const std::vector<std::string>& names, std::size_t i) {
  return i < names.size() ? names[i] : "x[" + std::to_string(i) + "]";
}

}  // namespace

VectorResult pso_minimize(const Objective& f, const Box& box, const PsoConfig& cfg,
                          const ProgressCallback& progress, int start_index) {
  cfg.validate();
  box.validate();
  const std::size_t d = box.size();
  const auto np = static_cast<std::size_t>(cfg.particles);
  Uniform rng{std::mt19937_64(cfg.seed)};

  std::vector<double> width(d), vmax(d);
  for (std::size_t j = 0; j < d; ++j) {
    width[j] = box.upper[j] - box.lower[j];
    vmax[j] = 0.2 * width[j];
  }

  std::vector<std::vector<double>> pos(np, std::vector<double>(d));
  std::vector<std::vector<double>> vel(np, std::vector<double>(d));
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      pos[i][j] = box.lower[j] + rng() * width[j];
      vel[i][j] = (2.0 * rng() - 1.0) * vmax[j];
    }
  }

  std::vector<double> loss(np);
  auto evaluate_all = [&] {
    detail::parallel_for(np, cfg.threads, [&](std::size_t i) { loss[i] = sanitize(f(pos[i])); });
  };

  evaluate_all();
  std::vector<std::vector<double>> best_pos = pos;
  std::vector<double> best_loss = loss;
  std::size_t leader = 0;
  for (std::size_t i = 1; i < np; ++i) {
    if (best_loss[i] < best_loss[leader]) leader = i;
  }
  std::vector<double> global = best_pos[leader];
  double global_loss = best_loss[leader];

  VectorResult out;
  out.history.push_back({0, global_loss});
  if (progress) progress({"pso", start_index, 0, global_loss});

  for (int it = 1; it <= cfg.iterations; ++it) {
    for (std::size_t i = 0; i < np; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const double r1 = rng();
        const double r2 = rng();
        double v = cfg.inertia * vel[i][j] +
                   cfg.cognitive * r1 * (best_pos[i][j] - pos[i][j]) +
                   cfg.social * r2 * (global[j] - pos[i][j]);
        v = std::clamp(v, -vmax[j], vmax[j]);
        double x = pos[i][j] + v;
        if (x < box.lower[j]) {
          x = box.lower[j];
          v = 0.0;
        } else if (x > box.upper[j]) {
          x = box.upper[j];
          v = 0.0;
        }
        pos[i][j] = x;
        vel[i][j] = v;
      }
    }
    evaluate_all();
    for (std::size_t i = 0; i < np; ++i) {
      if (loss[i] < best_loss[i]) {
        best_loss[i] = loss[i];
        best_pos[i] = pos[i];
      }
      if (loss[i] < global_loss) {
        global_loss = loss[i];
        global = pos[i];
      }
    }
    out.history.push_back({it, global_loss});
    if (progress) progress({"pso", start_index, it, global_loss});
  }

  out.x = std::move(global);
  out.loss = global_loss;
  out.evaluations = np * static_cast<std::size_t>(cfg.iterations + 1);
  return out;
}

std::vector<double> finite_difference_gradient(const Objective& f, std::span<const double> x,
                                               double fx, const Box& box, double step,
                                               const std::vector<std::string>& names) {
  std::vector<double> g(x.size(), 0.0);
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lo = box.lower[i];
    const double hi = box.upper[i];
    if (hi - lo <= 0.0) continue;
    const double xi = x[i];
    const bool up = xi + step <= hi;
    const bool down = xi - step >= lo;
    if (up && down) {
      probe[i] = xi + step;
      const double fp = f(probe);
      probe[i] = xi - step;
      const double fm = f(probe);
      g[i] = (fp - fm) / (2.0 * step);
    } else if (up) {
      probe[i] = xi + step;
      g[i] = (f(probe) - fx) / step;
    } else {
      probe[i] = xi - step;
      g[i] = (fx - f(probe)) / step;
    }
    probe[i] = xi;
    if (!std::isfinite(g[i])) {
      throw Error(ErrorCode::numerical,
                  "non-finite gradient component for " + coordinate_name(names, i));
    }
  }
  return g;
}

VectorResult refine_minimize(const Objective& f, const Box& box, std::vector<double> start,
                             const RefineConfig& cfg, const ProgressCallback& progress,
                             const std::vector<std::string>& names, int start_index) {
  cfg.validate();
  box.validate();
  if (start.size() != box.size()) {
    throw Error(ErrorCode::layout, "start vector does not match the bounds");
  }
  if (!box.contains(start)) {
    throw Error(ErrorCode::parameter, "refine start point lies outside the bounds");
  }

  std::size_t evaluations = 0;
  const Objective counted = [&](std::span<const double> x) {
    ++evaluations;
    return f(x);
  };

  // Scale every coordinate by its box width so durations (~1e3) and phases
  // (~1) share one curvature scale. Zero-width coordinates stay fixed.
  const std::size_t d = box.size();
  std::vector<double> lo = box.lower;
  std::vector<double> width(d);
  for (std::size_t i = 0; i < d; ++i) width[i] = box.upper[i] - box.lower[i];

  auto to_x = [&](const Eigen::VectorXd& u) {
    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = std::clamp(lo[i] + u[static_cast<Eigen::Index>(i)] * width[i], box.lower[i],
                        box.upper[i]);
    }
    return x;
  };
  auto gradient_u = [&](const Eigen::VectorXd& u, double fu) {
    const auto x = to_x(u);
    const auto gx = finite_difference_gradient(counted, x, fu, box, cfg.gradient_step, names);
    Eigen::VectorXd g(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) g[static_cast<Eigen::Index>(i)] = gx[i] * width[i];
    return g;
  };
  auto project = [&](Eigen::VectorXd u) {
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      u[i] = width[static_cast<std::size_t>(i)] > 0.0 ? std::clamp(u[i], 0.0, 1.0) : 0.0;
    }
    return u;
  };

  Eigen::VectorXd u(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    u[static_cast<Eigen::Index>(i)] = width[i] > 0.0 ? (start[i] - lo[i]) / width[i] : 0.0;
  }
  u = project(u);

  double fu = counted(to_x(u));
  if (!std::isfinite(fu)) {
    throw Error(ErrorCode::numerical, "objective is not finite at the refine start point");
  }
  Eigen::VectorXd g = gradient_u(u, fu);

  VectorResult out;
  out.history.push_back({0, fu});
  if (progress) progress({"refine", start_index, 0, fu});

  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> memory;
  int stalls = 0;

  auto free_mask = [&](const Eigen::VectorXd& at, const Eigen::VectorXd& grad) {
    Eigen::VectorXd m = Eigen::VectorXd::Ones(at.size());
    for (Eigen::Index i = 0; i < at.size(); ++i) {
      const bool fixed = width[static_cast<std::size_t>(i)] <= 0.0;
      const bool pinned_low = at[i] <= 0.0 && grad[i] > 0.0;
      const bool pinned_high = at[i] >= 1.0 && grad[i] < 0.0;
      if (fixed || pinned_low || pinned_high) m[i] = 0.0;
    }
    return m;
  };

  for (int it = 1; it <= cfg.max_iters; ++it) {
    const Eigen::VectorXd active = free_mask(u, g);
    const Eigen::VectorXd pg = g.cwiseProduct(active);
    if (pg.lpNorm<Eigen::Infinity>() <= 1e-15) break;

    Eigen::VectorXd dir;
    if (memory.empty()) {
      dir = -pg * (0.05 / pg.norm());
    } else {
      // Two-loop recursion restricted to the free coordinates.
      Eigen::VectorXd q = pg;
      std::vector<double> alpha(memory.size());
      for (std::size_t k = memory.size(); k-- > 0;) {
        const auto& [s, y] = memory[k];
        alpha[k] = s.cwiseProduct(active).dot(q) / s.dot(y);
        q -= alpha[k] * y.cwiseProduct(active);
      }
      const auto& [s_last, y_last] = memory.back();
      q *= s_last.dot(y_last) / y_last.dot(y_last);
      for (std::size_t k = 0; k < memory.size(); ++k) {
        const auto& [s, y] = memory[k];
        const double beta = y.cwiseProduct(active).dot(q) / s.dot(y);
        q += (alpha[k] - beta) * s.cwiseProduct(active);
      }
      dir = -q.cwiseProduct(active);
      if (!(dir.dot(g) < 0.0)) {
        memory.clear();
        dir = -pg * (0.05 / pg.norm());
      }
    }

    bool accepted = false;
    Eigen::VectorXd u_next;
    double f_next = fu;
    double step = 1.0;
    for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
      u_next = project(u + step * dir);
      const Eigen::VectorXd delta = u_next - u;
      if (delta.lpNorm<Eigen::Infinity>() == 0.0) break;
      f_next = counted(to_x(u_next));
      if (std::isfinite(f_next) && f_next <= fu + 1e-4 * g.dot(delta) && f_next < fu) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!memory.empty()) {
        memory.clear();
        continue;
      }
      break;
    }

    const Eigen::VectorXd g_next = gradient_u(u_next, f_next);
    const Eigen::VectorXd s = u_next - u;
    const Eigen::VectorXd y = g_next - g;
    if (s.dot(y) > 1e-18) {
      memory.emplace_back(s, y);
      if (memory.size() > static_cast<std::size_t>(cfg.memory)) memory.pop_front();
    }
    const double improvement = fu - f_next;
    u = u_next;
    fu = f_next;
    g = g_next;
    out.history.push_back({it, fu});
    if (progress) progress({"refine", start_index, it, fu});

    stalls = improvement < cfg.tolerance ? stalls + 1 : 0;
    if (stalls >= 3) break;
  }

  out.x = to_x(u);
  out.loss = fu;
  out.evaluations = evaluations;
  return out;
}

Objective pulse_objective(const SystemConfig& cfg, const CompositePulse& tmpl,
                          const ParamLayout& layout, const TargetSpec& spec) {
  cfg.validate();
  spec.validate();
  layout.validate(tmpl.size());
  if (spec.dim() != cfg.dim()) {
    throw Error(ErrorCode::shape, "target dimension does not match the system cutoff");
  }
  const UnitaryEvaluator evaluator(cfg);
  const int n = cfg.cutoff;
  if (spec.mask.rightCols(n).isZero()) {
    // Only ground-input columns are compared; skip the excited half.
    const Eigen::MatrixXd modulus = spec.modulus.leftCols(n);
    const Eigen::MatrixXd mask = spec.mask.leftCols(n);
    return [evaluator, tmpl, layout, modulus, mask](std::span<const double> x) {
      const Eigen::MatrixXcd cols = evaluator.ground_columns(unpack(x, tmpl, layout));
      return (mask.array() * (cols.cwiseAbs().array() - modulus.array())).matrix().norm();
    };
  }
  return [evaluator, tmpl, layout, spec](std::span<const double> x) {
    return modulus_loss(evaluator.unitary(unpack(x, tmpl, layout)), spec);
  };
}

std::vector<std::string> layout_names(const ParamLayout& layout) {
  std::vector<std::string> names;
  for (const auto& e : layout.entries) {
    std::string name;
    for (const auto& m : e.members) {
      if (!name.empty()) name += "=";
      name += std::string(to_string(m.field)) + "[" + std::to_string(m.pulse + 1) + "]";
    }
    names.push_back(name);
  }
  return names;
}

namespace {

Box layout_box(const ParamLayout& layout) {
  if (layout.entries.empty()) {
    throw Error(ErrorCode::config, "nothing to optimise: layout has no free entries");
  }
  return Box{layout.lower_bounds(), layout.upper_bounds()};
}

OptimizationResult to_pulse_result(const VectorResult& r, const CompositePulse& tmpl,
                                   const ParamLayout& layout) {
  return {unpack(r.x, tmpl, layout), r.loss, r.history, r.evaluations};
}

// Lower loss wins; losses equal to 1e-12 fall back to the shorter sequence.
bool better(double loss_a, double duration_a, double loss_b, double duration_b) {
  if (std::abs(loss_a - loss_b) <= 1e-12) return duration_a < duration_b;
  return loss_a < loss_b;
}

}  // namespace

OptimizationResult pso_search(const SystemConfig& cfg, const CompositePulse& tmpl,
                              const ParamLayout& layout, const TargetSpec& spec,
                              const PsoConfig& pcfg, const ProgressCallback& progress) {
  const Box box = layout_box(layout);
  const auto f = pulse_objective(cfg, tmpl, layout, spec);
  return to_pulse_result(pso_minimize(f, box, pcfg, progress), tmpl, layout);
}

OptimizationResult refine(const SystemConfig& cfg, const CompositePulse& start,
                          const ParamLayout& layout, const TargetSpec& spec,
                          const RefineConfig& rcfg, const ProgressCallback& progress) {
  const Box box = layout_box(layout);
  const auto f = pulse_objective(cfg, start, layout, spec);
  return to_pulse_result(
      refine_minimize(f, box, pack(start, layout), rcfg, progress, layout_names(layout)),
      start, layout);
}

OptimizationResult design_pulse(const SystemConfig& cfg, const CompositePulse& tmpl,
                                const ParamLayout& layout, const TargetSpec& spec,
                                const DesignConfig& dcfg, const ProgressCallback& progress) {
  dcfg.validate();
  const Box box = layout_box(layout);
  const auto f = pulse_objective(cfg, tmpl, layout, spec);
  const auto names = layout_names(layout);

  struct Candidate {
    VectorResult result;
    double duration;
  };
  auto duration_of = [&](const std::vector<double>& x) {
    return unpack(x, tmpl, layout).total_duration();
  };

  OptimizationResult out;
  double best_so_far = std::numeric_limits<double>::infinity();
  int clock = 0;
  auto record = [&](const std::vector<HistoryPoint>& h) {
    for (const auto& p : h) {
      best_so_far = std::min(best_so_far, p.loss);
      out.history.push_back({clock++, best_so_far});
    }
  };

  std::vector<Candidate> swarms;
  for (int s = 0; s < dcfg.starts; ++s) {
    PsoConfig pcfg = dcfg.pso;
    pcfg.seed = dcfg.pso.seed + static_cast<std::uint64_t>(s);
    auto r = pso_minimize(f, box, pcfg, progress, s);
    out.evaluations += r.evaluations;
    record(r.history);
    const double dur = duration_of(r.x);
    swarms.push_back({std::move(r), dur});
  }
  std::stable_sort(swarms.begin(), swarms.end(), [](const Candidate& a, const Candidate& b) {
    return better(a.result.loss, a.duration, b.result.loss, b.duration);
  });

  std::vector<Candidate> polished;
  const auto keep = std::min<std::size_t>(swarms.size(), static_cast<std::size_t>(dcfg.refined));
  for (std::size_t k = 0; k < keep; ++k) {
    auto r = refine_minimize(f, box, swarms[k].result.x, dcfg.refine, progress, names,
                             static_cast<int>(k));
    out.evaluations += r.evaluations;
    record(r.history);
    const double dur = duration_of(r.x);
    polished.push_back({std::move(r), dur});
  }

  const auto winner = std::min_element(
      polished.begin(), polished.end(), [](const Candidate& a, const Candidate& b) {
        return better(a.result.loss, a.duration, b.result.loss, b.duration);
      });
  out.best = unpack(winner->result.x, tmpl, layout);
  out.loss = winner->result.loss;
  return out;
}

}  // namespace fockpulse
