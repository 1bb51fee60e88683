#pragma once

// Forward model of a 1-D pinhole camera: perspective projection onto the
// image line followed by pixel quantization.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "shape/error.hpp"
#include "shape/geometry.hpp"

namespace shape {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Maps any angle to [0, 2π).
inline double normalize_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;  // fmod of a value just below a multiple of 2π
  return r;
}

/// Shortest signed angular difference a - b, in (-π, π].
inline double angle_difference(double a, double b) {
  double d = std::remainder(a - b, kTwoPi);
  if (d <= -std::numbers::pi) d += kTwoPi;
  return d;
}

/// Focal length f, sensor width tau and resolution N; pixel width is tau/N.
class CameraModel {
 public:
  CameraModel(double focal_length, int resolution, double sensor_width)
      : f_(focal_length), n_(resolution), tau_(sensor_width), w_(sensor_width / resolution) {
    if (!(focal_length > 0.0) || !(sensor_width > 0.0) || resolution < 1 ||
        !std::isfinite(focal_length) || !std::isfinite(sensor_width)) {
      throw Error(ErrorCode::kInvalidCamera, "require f > 0, tau > 0, N >= 1");
    }
  }

  double focal_length() const { return f_; }
  int resolution() const { return n_; }
  double sensor_width() const { return tau_; }
  double pixel_width() const { return w_; }

 private:
  double f_;
  int n_;
  double tau_;
  double w_;
};

/// Camera with sensor width 2 f tan(fov/2).
inline CameraModel fov_from_degrees(double focal_length, double fov_degrees, int resolution) {
  if (!(fov_degrees > 0.0 && fov_degrees < 180.0)) {
    throw Error(ErrorCode::kInvalidFov, "field of view must lie in (0, 180) degrees");
  }
  const double half = fov_degrees * std::numbers::pi / 360.0;
  return CameraModel(focal_length, resolution, 2.0 * focal_length * std::tan(half));
}

/// Camera centre (t_x, t_z) and anti-clockwise orientation theta in [0, 2π).
struct Pose {
  Pose() = default;
  Pose(double tx, double tz, double angle) : t_x(tx), t_z(tz), theta(normalize_angle(angle)) {}

  Point2 location() const { return {t_x, t_z}; }

  double t_x = 0.0;
  double t_z = 0.0;
  double theta = 0.0;
};

/// Point expressed in the camera frame: `lateral` along the image line,
/// `depth` along the optical axis.
struct CameraFrame {
  double lateral;
  double depth;
};

inline CameraFrame to_camera_frame(const Pose& pose, Point2 s) {
  const double c = std::cos(pose.theta);
  const double sn = std::sin(pose.theta);
  const double dx = s.x - pose.t_x;
  const double dz = s.z - pose.t_z;
  return {dx * c + dz * sn, dz * c - dx * sn};
}

inline Point2 from_camera_frame(const Pose& pose, CameraFrame p) {
  const double c = std::cos(pose.theta);
  const double sn = std::sin(pose.theta);
  return {pose.t_x + c * p.lateral - sn * p.depth, pose.t_z + sn * p.lateral + c * p.depth};
}

/// f * lateral / depth without the front-of-camera check.
inline double projection_ratio(const CameraModel& cam, const Pose& pose, Point2 s) {
  const CameraFrame p = to_camera_frame(pose, s);
  return cam.focal_length() * p.lateral / p.depth;
}

/// Image-line coordinate of s. Throws kBehindCamera unless s has positive depth.
inline double project(const CameraModel& cam, const Pose& pose, Point2 s) {
  const CameraFrame p = to_camera_frame(pose, s);
  if (!(p.depth > 0.0)) throw Error(ErrorCode::kBehindCamera, "point is not in front of the camera");
  return cam.focal_length() * p.lateral / p.depth;
}

/// A pixel centre on the image line, or std::nullopt for the out-of-view sentinel.
using Observation = std::optional<double>;

/// Pixel-centre quantizer.
///
/// Even N: pixel centres at (m + 1/2) w, m = floor(p / w).
/// Odd N: pixel centres at m w, m = floor(p / w + 1/2).
/// Values outside [-tau/2, tau/2] map to the sentinel; the closed ends map to
/// the outermost pixel and interior pixel boundaries go to the upper pixel.
inline Observation quantize(const CameraModel& cam, double p) {
  const double half = 0.5 * cam.sensor_width();
  if (!(p >= -half && p <= half)) return std::nullopt;
  const double w = cam.pixel_width();
  const int n = cam.resolution();
  if (n % 2 == 0) {
    const double lo = -n / 2;
    const double hi = n / 2 - 1;
    const double m = std::clamp(std::floor(p / w), lo, hi);
    return m * w + 0.5 * w;
  }
  const double hi = (n - 1) / 2;
  const double m = std::clamp(std::floor(p / w + 0.5), -hi, hi);
  return m * w;
}

/// Quantized projections of every point. Points behind the camera or outside
/// the field of view become the sentinel.
inline std::vector<Observation> observe(const CameraModel& cam, const Pose& pose,
                                        std::span<const Point2> points) {
  std::vector<Observation> out;
  out.reserve(points.size());
  for (const Point2& s : points) {
    const CameraFrame p = to_camera_frame(pose, s);
    if (!(p.depth > 0.0)) {
      out.emplace_back(std::nullopt);
      continue;
    }
    out.push_back(quantize(cam, cam.focal_length() * p.lateral / p.depth));
  }
  return out;
}

}  // namespace shape
