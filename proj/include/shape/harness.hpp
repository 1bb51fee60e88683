#pragma once

// Monte-Carlo experiments and timing benchmarks over generated scenes.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "shape/baselines.hpp"
#include "shape/camera.hpp"
#include "shape/error.hpp"
#include "shape/estimator.hpp"
#include "shape/scenegen.hpp"

namespace shape {

enum class Method { kShape, kL2, kLInf };
enum class Mode { kKnownOrientation, kFullPose };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::kShape: return "shape";
    case Method::kL2: return "l2";
    case Method::kLInf: return "linf";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view s) {
  if (s == "shape") return Method::kShape;
  if (s == "l2") return Method::kL2;
  if (s == "linf") return Method::kLInf;
  return std::nullopt;
}

inline std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "known") return Mode::kKnownOrientation;
  if (s == "full") return Mode::kFullPose;
  return std::nullopt;
}

/// Worker count: SHAPE_THREADS when set to a positive integer, else the
/// hardware concurrency.
inline int default_threads() {
  if (const char* env = std::getenv("SHAPE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, n) on `threads` workers. Callers write results
/// into per-index slots, so the outcome does not depend on scheduling.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Solver settings shared by every estimate of an experiment.
struct EstimatorSettings {
  ConvexPolygon world = default_world();
  GridSpec grid;
  SweepConfig sweep;
};

/// One estimate of the scene's pose. Throws shape::Error when SHAPE finds
/// no usable region.
inline PoseEstimate run_method(Method method, Mode mode, const Scene& scene,
                               const EstimatorSettings& settings) {
  const bool known = mode == Mode::kKnownOrientation;
  if (known && !scene.true_pose) {
    throw Error(ErrorCode::kInvalidConfig, "known-orientation mode needs the scene orientation");
  }
  const double theta = known ? scene.true_pose->theta : 0.0;
  switch (method) {
    case Method::kShape:
      return known ? estimate_location(scene.camera, theta, scene.points, scene.observations, settings.world)
                   : estimate_pose(scene.camera, scene.points, scene.observations, settings.world,
                                   settings.sweep);
    case Method::kL2:
      return (known ? minimize_l2(scene.camera, theta, scene.points, scene.observations, settings.grid)
                    : minimize_l2(scene.camera, scene.points, scene.observations, settings.grid))
          .estimate;
    case Method::kLInf:
      return (known ? minimize_linf(scene.camera, theta, scene.points, scene.observations, settings.grid)
                    : minimize_linf(scene.camera, scene.points, scene.observations, settings.grid))
          .estimate;
  }
  throw std::logic_error("unknown method");
}

inline double squared_location_error(const PoseEstimate& est, const Pose& truth) {
  const double dx = est.t_x_hat - truth.t_x;
  const double dz = est.t_z_hat - truth.t_z;
  return dx * dx + dz * dz;
}

struct TrialOutcome {
  bool ok = false;
  double sq_err = 0.0;
  double sq_theta_err = 0.0;
  double ms = 0.0;
};

struct ExperimentRow {
  Method method = Method::kShape;
  int m = 0;
  int trials_used = 0;
  int trials_excluded = 0;
  double mean_sq_err = 0.0;
  double mean_sq_theta_err = 0.0;
  double median_ms = 0.0;
  /// Per-trial outcomes in trial order, for paired comparisons.
  std::vector<TrialOutcome> trials;

  double log2_m() const { return std::log2(static_cast<double>(m)); }
  double log2_err() const { return std::log2(mean_sq_err); }
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;  // sorted by M, then by method order

  const ExperimentRow* find(Method method, int m) const {
    for (const auto& r : rows) {
      if (r.method == method && r.m == m) return &r;
    }
    return nullptr;
  }
};

struct SimulationOptions {
  SceneConfig config;
  int m_min = 5;
  int m_max = 15;
  int trials = 1000;
  std::vector<Method> methods{Method::kShape, Method::kL2, Method::kLInf};
  Mode mode = Mode::kKnownOrientation;
  EstimatorSettings settings;
  int threads = default_threads();
};

/// Scene stream for one (M, trial) pair; every method sees the same scene.
inline std::uint64_t trial_stream(int m, int trial) {
  return (static_cast<std::uint64_t>(m) << 32) | static_cast<std::uint32_t>(trial);
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

inline ExperimentRow summarize(Method method, int m, std::vector<TrialOutcome> trials) {
  ExperimentRow row;
  row.method = method;
  row.m = m;
  double sum = 0.0;
  double sum_theta = 0.0;
  std::vector<double> times;
  for (const TrialOutcome& t : trials) {
    if (!t.ok) {
      ++row.trials_excluded;
      continue;
    }
    ++row.trials_used;
    sum += t.sq_err;
    sum_theta += t.sq_theta_err;
    times.push_back(t.ms);
  }
  if (row.trials_used > 0) {
    row.mean_sq_err = sum / row.trials_used;
    row.mean_sq_theta_err = sum_theta / row.trials_used;
  }
  row.median_ms = median(std::move(times));
  row.trials = std::move(trials);
  return row;
}

/// Mean squared location error per (M, method) over `trials` random scenes.
/// Trials whose estimator fails are excluded and counted.
inline ExperimentResult run_simulation(const SimulationOptions& opt) {
  if (opt.m_min < 1 || opt.m_max < opt.m_min || opt.trials < 1 || opt.methods.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "need 1 <= m_min <= m_max, trials >= 1 and a method");
  }
  const std::size_t n_m = static_cast<std::size_t>(opt.m_max - opt.m_min + 1);
  const std::size_t n_trials = static_cast<std::size_t>(opt.trials);
  const std::size_t n_methods = opt.methods.size();
  std::vector<TrialOutcome> out(n_m * n_trials * n_methods);

  parallel_for(n_m * n_trials, opt.threads, [&](std::size_t job) {
    const int m = opt.m_min + static_cast<int>(job / n_trials);
    const int trial = static_cast<int>(job % n_trials);
    SceneConfig cfg = opt.config;
    cfg.num_points = m;
    const Scene scene = generate(cfg, trial_stream(m, trial));
    for (std::size_t k = 0; k < n_methods; ++k) {
      TrialOutcome& slot = out[(job * n_methods) + k];
      const auto start = std::chrono::steady_clock::now();
      try {
        const PoseEstimate est = run_method(opt.methods[k], opt.mode, scene, opt.settings);
        slot.sq_err = squared_location_error(est, *scene.true_pose);
        if (est.theta_hat) {
          const double d = angle_difference(*est.theta_hat, scene.true_pose->theta);
          slot.sq_theta_err = d * d;
        }
        slot.ok = true;
      } catch (const Error&) {
        slot.ok = false;
      }
      slot.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
  });

  ExperimentResult result;
  for (std::size_t mi = 0; mi < n_m; ++mi) {
    for (std::size_t k = 0; k < n_methods; ++k) {
      std::vector<TrialOutcome> trials(n_trials);
      for (std::size_t t = 0; t < n_trials; ++t) trials[t] = out[((mi * n_trials + t) * n_methods) + k];
      result.rows.push_back(summarize(opt.methods[k], opt.m_min + static_cast<int>(mi), std::move(trials)));
    }
  }
  return result;
}

inline double least_squares_slope(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 2) return std::nan("");
  double mx = 0.0, my = 0.0;
  for (auto [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0.0, sxx = 0.0;
  for (auto [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return sxy / sxx;
}

/// Least-squares slope of log2(mean error) against log2(M) over the rows of
/// one method with positive error.
inline double loglog_slope(const ExperimentResult& result, Method method) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : result.rows) {
    if (r.method == method && r.trials_used > 0 && r.mean_sq_err > 0.0) {
      pts.emplace_back(r.log2_m(), r.log2_err());
    }
  }
  return least_squares_slope(pts);
}

namespace detail {

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace detail

inline constexpr std::string_view kSimulationCsvHeader =
    "method,M,trials_used,trials_excluded,mean_sq_err,log2_M,log2_err,median_ms";

/// One row per (M, method). With `timing` false the median_ms column is 0,
/// which makes the output depend only on seed, config and flags.
inline void write_csv(std::ostream& os, const ExperimentResult& result, bool timing = true) {
  os << kSimulationCsvHeader << '\n';
  for (const auto& r : result.rows) {
    os << to_string(r.method) << ',' << r.m << ',' << r.trials_used << ',' << r.trials_excluded << ','
       << detail::format_number(r.mean_sq_err) << ',' << detail::format_number(r.log2_m()) << ','
       << detail::format_number(r.trials_used > 0 ? r.log2_err() : std::nan("")) << ','
       << detail::format_number(timing ? r.median_ms : 0.0) << '\n';
  }
}

/// gnuplot-friendly blocks, one per method: M, error, log2 M, log2 error,
/// mean squared orientation error.
inline void write_dat(std::ostream& os, const ExperimentResult& result) {
  std::vector<Method> order;
  for (const auto& r : result.rows) {
    if (std::find(order.begin(), order.end(), r.method) == order.end()) order.push_back(r.method);
  }
  bool first = true;
  for (Method m : order) {
    if (!first) os << "\n\n";
    first = false;
    os << "# " << to_string(m) << "\n# M mean_sq_err log2_M log2_err mean_sq_theta_err\n";
    for (const auto& r : result.rows) {
      if (r.method != m) continue;
      os << r.m << ' ' << detail::format_number(r.mean_sq_err) << ' ' << detail::format_number(r.log2_m())
         << ' ' << detail::format_number(r.log2_err()) << ' ' << detail::format_number(r.mean_sq_theta_err)
         << '\n';
    }
  }
}

struct BenchRow {
  int m = 0;
  double median_ms = 0.0;
  std::size_t max_vertices = 0;
  std::size_t vertex_work = 0;

  double ms_per_point() const { return median_ms / m; }
};

/// Median wall-clock of one known-orientation location_region call per M,
/// with the largest intermediate polygon seen while clipping. Repetitions
/// are interleaved across the M values (after one untimed warm-up pass) so
/// that a transient slowdown does not land on a single M.
inline std::vector<BenchRow> run_bench(const SceneConfig& config, const std::vector<int>& m_list,
                                       int repetitions = 51, const ConvexPolygon& world = default_world()) {
  if (!std::is_sorted(m_list.begin(), m_list.end())) {
    throw Error(ErrorCode::kInvalidConfig, "M list must be ascending");
  }
  std::vector<Scene> scenes;
  std::vector<BenchRow> rows;
  for (int m : m_list) {
    SceneConfig cfg = config;
    cfg.num_points = m;
    scenes.push_back(generate(cfg, trial_stream(m, 0)));
    rows.push_back({m, 0.0, 0, 0});
  }
  std::vector<std::vector<double>> times(m_list.size());
  for (int rep = -1; rep < repetitions; ++rep) {
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      const Scene& scene = scenes[i];
      ClipStats stats;
      const auto start = std::chrono::steady_clock::now();
      const ConsistencySlice slice =
          location_region(scene.camera, scene.true_pose->theta, scene.points, scene.observations, world, stats);
      const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      if (slice.region.size() > 1u << 30) std::abort();  // keeps the call observable
      if (rep < 0) continue;
      times[i].push_back(ms);
      rows[i].max_vertices = std::max(rows[i].max_vertices, stats.max_vertices);
      rows[i].vertex_work = stats.vertex_work;
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].median_ms = median(std::move(times[i]));
  return rows;
}

inline void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "M,median_ms,ms_per_point,max_vertices\n";
  for (const auto& r : rows) {
    os << r.m << ',' << detail::format_number(r.median_ms) << ',' << detail::format_number(r.ms_per_point())
       << ',' << r.max_vertices << '\n';
  }
}

}  // namespace shape
