#pragma once

// Seeded random scenes: a camera pose and M points inside its field of view.
//
// Random numbers: each scene draws from its own std::mt19937_64 stream,
// seeded with splitmix64 applied to (seed, stream index). Uniform doubles
// take the top 53 bits of one 64-bit draw. Both algorithms are fully
// specified, so scenes reproduce bit-for-bit across platforms and languages.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "shape/camera.hpp"
#include "shape/error.hpp"
#include "shape/geometry.hpp"

namespace shape {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class SceneRng {
 public:
  SceneRng(std::uint64_t seed, std::uint64_t stream)
      : engine_(splitmix64(splitmix64(seed) ^ stream)) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

struct SceneConfig {
  std::uint64_t seed = 1;
  int num_points = 10;
  double depth_min = 2.0;
  double depth_max = 10.0;
  /// Fraction of the half sensor width kept clear at each end.
  double lateral_margin = 0.05;
  double pose_x_min = -5.0;
  double pose_x_max = 5.0;
  double pose_z_min = -5.0;
  double pose_z_max = 5.0;
  double theta_min = 0.0;
  double theta_max = kTwoPi;
  CameraModel camera = fov_from_degrees(1.0, 90.0, 320);

  void validate() const {
    if (num_points < 1) throw Error(ErrorCode::kInvalidConfig, "num_points must be >= 1");
    if (!(depth_min > 0.0 && depth_max > depth_min)) {
      throw Error(ErrorCode::kInvalidConfig, "depth range must be positive and ordered");
    }
    if (!(lateral_margin >= 0.0 && lateral_margin < 1.0)) {
      throw Error(ErrorCode::kInvalidConfig, "lateral_margin must lie in [0, 1)");
    }
    if (!(pose_x_max >= pose_x_min) || !(pose_z_max >= pose_z_min) || !(theta_max >= theta_min)) {
      throw Error(ErrorCode::kInvalidConfig, "pose ranges must be ordered");
    }
  }

  ConvexPolygon pose_box() const {
    return ConvexPolygon::box(pose_x_min, pose_x_max, pose_z_min, pose_z_max);
  }
};

struct Scene {
  CameraModel camera = fov_from_degrees(1.0, 90.0, 320);
  std::optional<Pose> true_pose;
  std::vector<Point2> points;
  std::vector<Observation> observations;
};

namespace detail {

inline Pose sample_pose(const SceneConfig& config, SceneRng& rng) {
  const double tx = rng.uniform(config.pose_x_min, config.pose_x_max);
  const double tz = rng.uniform(config.pose_z_min, config.pose_z_max);
  const double theta = rng.uniform(config.theta_min, config.theta_max);
  return {tx, tz, theta};
}

}  // namespace detail

/// Scene number `stream` of the experiment seeded by config.seed. Depth is
/// uniform in the configured range and the image-line position uniform in
/// the sensor minus the lateral margin; points are back-projected to world.
inline Scene generate(const SceneConfig& config, std::uint64_t stream = 0) {
  config.validate();
  SceneRng rng(config.seed, stream);
  Scene scene;
  scene.camera = config.camera;
  const Pose pose = detail::sample_pose(config, rng);
  scene.true_pose = pose;

  const double f = config.camera.focal_length();
  const double half = 0.5 * config.camera.sensor_width() * (1.0 - config.lateral_margin);
  scene.points.reserve(static_cast<std::size_t>(config.num_points));
  for (int i = 0; i < config.num_points; ++i) {
    const double depth = rng.uniform(config.depth_min, config.depth_max);
    const double image = rng.uniform(-half, half);
    scene.points.push_back(from_camera_frame(pose, {image * depth / f, depth}));
  }
  scene.observations = observe(scene.camera, pose, scene.points);
  return scene;
}

struct CollinearScene {
  Scene scene;
  /// Distance from the true camera centre to the line through the points.
  double camera_line_distance = 0.0;
  /// Largest pairwise distance between the generated points.
  double spread = 0.0;
};

/// M points uniform on a segment. The endpoints are given in the camera
/// frame as (lateral, depth) and must both lie strictly inside the field of
/// view; the segment then lies inside it as well.
inline CollinearScene generate_collinear(const SceneConfig& config, CameraFrame end0,
                                         CameraFrame end1, std::uint64_t stream = 0) {
  config.validate();
  const double f = config.camera.focal_length();
  const double half = 0.5 * config.camera.sensor_width();
  for (const CameraFrame& e : {end0, end1}) {
    if (!(e.depth > 0.0) || !(std::abs(f * e.lateral / e.depth) < half)) {
      throw Error(ErrorCode::kSegmentOutOfFov, "segment endpoint outside the field of view");
    }
  }
  if (end0.lateral == end1.lateral && end0.depth == end1.depth) {
    throw Error(ErrorCode::kInvalidConfig, "segment endpoints coincide");
  }

  SceneRng rng(config.seed, stream);
  CollinearScene out;
  Scene& scene = out.scene;
  scene.camera = config.camera;
  const Pose pose = detail::sample_pose(config, rng);
  scene.true_pose = pose;
  const Point2 a = from_camera_frame(pose, end0);
  const Point2 b = from_camera_frame(pose, end1);

  double lo = 1.0;
  double hi = 0.0;
  scene.points.reserve(static_cast<std::size_t>(config.num_points));
  for (int i = 0; i < config.num_points; ++i) {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    scene.points.push_back(a + u * (b - a));
  }
  scene.observations = observe(scene.camera, pose, scene.points);

  const Point2 dir = b - a;
  out.camera_line_distance = std::abs(cross(dir, pose.location() - a)) / norm(dir);
  out.spread = (hi - lo) * norm(dir);
  return out;
}

}  // namespace shape
