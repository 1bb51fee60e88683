#pragma once

// Reprojection-error baselines: brute-force global minimization of the
// l2 and l-infinity norms of the residuals by multi-stage grid refinement.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "shape/camera.hpp"
#include "shape/error.hpp"
#include "shape/estimator.hpp"
#include "shape/geometry.hpp"

namespace shape {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

/// Stage-0 bounds and resolution of the brute-force search. Each later
/// stage re-centres the bounds on the incumbent and scales their widths by
/// `shrink`. The theta dimension is periodic at stage 0.
struct GridSpec {
  Interval t_x{-5.0, 5.0};
  Interval t_z{-5.0, 5.0};
  Interval theta{0.0, kTwoPi};
  std::array<int, 3> points{64, 64, 128};
  int refinements = 3;
  double shrink = 0.15;

  void validate() const {
    if (points[0] < 2 || points[1] < 2 || points[2] < 2) {
      throw Error(ErrorCode::kInvalidGrid, "need at least 2 points per dimension");
    }
    if (!(shrink > 0.0 && shrink < 1.0)) throw Error(ErrorCode::kInvalidGrid, "shrink must lie in (0,1)");
    if (refinements < 0) throw Error(ErrorCode::kInvalidGrid, "negative refinement count");
    if (!(t_x.width() > 0.0) || !(t_z.width() > 0.0) || !(theta.width() > 0.0)) {
      throw Error(ErrorCode::kInvalidGrid, "empty bounds");
    }
  }

  /// Spacing of the last stage per dimension (t_x, t_z, theta).
  std::array<double, 3> final_resolution() const {
    const double scale = std::pow(shrink, refinements);
    return {t_x.width() * scale / (points[0] - 1), t_z.width() * scale / (points[1] - 1),
            refinements == 0 ? theta.width() / points[2]
                             : theta.width() * scale / (points[2] - 1)};
  }

  static GridSpec around(const ConvexPolygon& box) {
    GridSpec g;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, z0 = x0, z1 = -x0;
    for (const Point2& p : box.vertices()) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      z0 = std::min(z0, p.z);
      z1 = std::max(z1, p.z);
    }
    g.t_x = {x0, x1};
    g.t_z = {z0, z1};
    return g;
  }
};

/// Per-correspondence residual q_i - p_i(pose). A sentinel mismatch (the
/// model predicts out of view where a pixel was observed, or the reverse)
/// costs the sensor width; matching sentinels cost zero.
inline std::vector<double> reprojection_residuals(const CameraModel& cam, const Pose& pose,
                                                  std::span<const Point2> points,
                                                  std::span<const Observation> observations) {
  if (points.size() != observations.size()) {
    throw std::invalid_argument("points and observations differ in length");
  }
  const double half = 0.5 * cam.sensor_width();
  std::vector<double> r;
  r.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const CameraFrame c = to_camera_frame(pose, points[i]);
    const double p = cam.focal_length() * c.lateral / c.depth;
    const bool visible = c.depth > 0.0 && p >= -half && p <= half;
    if (observations[i] && visible) {
      r.push_back(*observations[i] - p);
    } else if (observations[i] || visible) {
      r.push_back(cam.sensor_width());
    } else {
      r.push_back(0.0);
    }
  }
  return r;
}

enum class Norm { kL2, kLInf };

struct GridSearchResult {
  PoseEstimate estimate;
  double cost = 0.0;
  /// Best cost after each stage; non-increasing.
  std::vector<double> stage_costs;
};

namespace detail {

struct Correspondence {
  double x, z, q;
  bool observed;
};

// Cost at one pose with precomputed rotation; mirrors reprojection_residuals.
inline double pose_cost(Norm norm, const CameraModel& cam, double tx, double tz, double c,
                        double sn, std::span<const Correspondence> corr, double bail) {
  const double f = cam.focal_length();
  const double half = 0.5 * cam.sensor_width();
  const double penalty = cam.sensor_width();
  double acc = 0.0;
  for (const Correspondence& k : corr) {
    const double dx = k.x - tx;
    const double dz = k.z - tz;
    const double depth = dz * c - dx * sn;
    const double p = f * (dx * c + dz * sn) / depth;
    const bool visible = depth > 0.0 && p >= -half && p <= half;
    double r;
    if (k.observed && visible) {
      r = std::abs(k.q - p);
    } else if (k.observed || visible) {
      r = penalty;
    } else {
      r = 0.0;
    }
    if (norm == Norm::kL2) {
      acc += r * r;
    } else {
      acc = std::max(acc, r);
    }
    if (acc > bail) return acc;  // already worse than the incumbent
  }
  return acc;
}

inline std::vector<double> axis(Interval iv, int n, bool periodic) {
  std::vector<double> v(static_cast<std::size_t>(n));
  const double step = periodic ? iv.width() / n : iv.width() / (n - 1);
  for (int i = 0; i < n; ++i) v[i] = iv.lo + step * i;
  return v;
}

inline Interval recentre(Interval stage0, double width, double centre, bool clamp) {
  Interval iv{centre - 0.5 * width, centre + 0.5 * width};
  if (clamp) {
    if (iv.lo < stage0.lo) iv = {stage0.lo, stage0.lo + width};
    if (iv.hi > stage0.hi) iv = {stage0.hi - width, stage0.hi};
  }
  return iv;
}

inline GridSearchResult grid_search(Norm norm, const CameraModel& cam,
                                    std::span<const Point2> points,
                                    std::span<const Observation> observations, const GridSpec& grid,
                                    std::optional<double> known_theta) {
  grid.validate();
  if (points.size() != observations.size()) {
    throw std::invalid_argument("points and observations differ in length");
  }
  std::vector<Correspondence> corr;
  corr.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    corr.push_back({points[i].x, points[i].z, observations[i].value_or(0.0), observations[i].has_value()});
  }

  GridSearchResult result;
  double best = std::numeric_limits<double>::infinity();
  double bx = 0.0, bz = 0.0, bt = known_theta.value_or(0.0);
  Interval xs = grid.t_x, zs = grid.t_z, ts = grid.theta;
  double wx = grid.t_x.width(), wz = grid.t_z.width(), wt = grid.theta.width();

  for (int stage = 0; stage <= grid.refinements; ++stage) {
    const std::vector<double> ax = axis(xs, grid.points[0], false);
    const std::vector<double> az = axis(zs, grid.points[1], false);
    const std::vector<double> at =
        known_theta ? std::vector<double>{*known_theta} : axis(ts, grid.points[2], stage == 0);
    // Cells are visited in increasing linear index (theta, x, z); only a
    // strictly smaller cost replaces the incumbent, so the lowest index wins ties.
    for (double t : at) {
      const double c = std::cos(t);
      const double sn = std::sin(t);
      for (double x : ax) {
        for (double z : az) {
          const double cost = pose_cost(norm, cam, x, z, c, sn, corr, best);
          if (cost < best) {
            best = cost;
            bx = x;
            bz = z;
            bt = t;
          }
        }
      }
    }
    result.stage_costs.push_back(best);
    wx *= grid.shrink;
    wz *= grid.shrink;
    wt *= grid.shrink;
    xs = recentre(grid.t_x, wx, bx, true);
    zs = recentre(grid.t_z, wz, bz, true);
    ts = recentre(grid.theta, wt, bt, false);
  }

  result.cost = best;
  result.estimate = {bx, bz, known_theta ? std::nullopt : std::optional<double>(normalize_angle(bt)),
                     false};
  return result;
}

}  // namespace detail

/// Global minimizer of the sum of squared residuals over the grid.
inline GridSearchResult minimize_l2(const CameraModel& cam, std::span<const Point2> points,
                                    std::span<const Observation> observations,
                                    const GridSpec& grid = {}) {
  return detail::grid_search(Norm::kL2, cam, points, observations, grid, std::nullopt);
}

/// Known-orientation variant: theta is fixed and only (t_x, t_z) is searched.
inline GridSearchResult minimize_l2(const CameraModel& cam, double theta,
                                    std::span<const Point2> points,
                                    std::span<const Observation> observations,
                                    const GridSpec& grid = {}) {
  return detail::grid_search(Norm::kL2, cam, points, observations, grid, theta);
}

/// Global minimizer of the largest absolute residual over the grid.
inline GridSearchResult minimize_linf(const CameraModel& cam, std::span<const Point2> points,
                                      std::span<const Observation> observations,
                                      const GridSpec& grid = {}) {
  return detail::grid_search(Norm::kLInf, cam, points, observations, grid, std::nullopt);
}

inline GridSearchResult minimize_linf(const CameraModel& cam, double theta,
                                      std::span<const Point2> points,
                                      std::span<const Observation> observations,
                                      const GridSpec& grid = {}) {
  return detail::grid_search(Norm::kLInf, cam, points, observations, grid, theta);
}

/// Cost of a pose under the given norm, from reprojection_residuals.
inline double reprojection_cost(Norm norm, const CameraModel& cam, const Pose& pose,
                                std::span<const Point2> points,
                                std::span<const Observation> observations) {
  double acc = 0.0;
  for (double r : reprojection_residuals(cam, pose, points, observations)) {
    acc = norm == Norm::kL2 ? acc + r * r : std::max(acc, std::abs(r));
  }
  return acc;
}

}  // namespace shape
