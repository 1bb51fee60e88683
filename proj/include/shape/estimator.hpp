#pragma once

// Consistency-region pose estimation.
//
// Every observed pixel confines the camera centre to a wedge apexed at the
// point source: the set of locations from which the point projects inside
// that pixel. With the orientation fixed, the wedges are half-plane pairs
// and their intersection is a convex polygon; the estimate is its centroid.
// With the orientation unknown, the polygon is computed on a sweep of
// candidate orientations and the slices are combined by area weight.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "shape/camera.hpp"
#include "shape/error.hpp"
#include "shape/geometry.hpp"

namespace shape {

/// Default prior on the camera location.
inline constexpr double kDefaultWorldHalfWidth = 50.0;

inline ConvexPolygon default_world() { return ConvexPolygon::square(kDefaultWorldHalfWidth); }

/// Location-consistency region for one candidate orientation.
struct ConsistencySlice {
  double alpha = 0.0;
  ConvexPolygon region;
  double area = 0.0;
  std::optional<Point2> centroid;  // set iff area > kAreaEps
  bool touches_world = false;
};

struct PoseEstimate {
  double t_x_hat = 0.0;
  double t_z_hat = 0.0;
  std::optional<double> theta_hat;
  bool region_clipped = false;

  Point2 location() const { return {t_x_hat, t_z_hat}; }
};

/// Raw coefficients of the two pixel-edge constraints of one point:
///   a  t_x + b  t_z + c  >= 0   (projection at most q + w/2)
///   a' t_x + b' t_z + c' <= 0   (projection at least q - w/2)
struct WedgeCoefficients {
  double a, b, c;
  double a_prime, b_prime, c_prime;
};

inline WedgeCoefficients wedge_coefficients(const CameraModel& cam, double theta, Point2 s,
                                            double q) {
  const double f = cam.focal_length();
  const double hw = 0.5 * cam.pixel_width();
  const double c = std::cos(theta);
  const double sn = std::sin(theta);
  const double along = s.z * c - s.x * sn;
  const double fixed = f * s.x * c + f * s.z * sn;
  const double upper = q + hw;
  const double lower = q - hw;
  return {f * c + upper * sn, f * sn - upper * c, upper * along - fixed,
          f * c + lower * sn, f * sn - lower * c, lower * along - fixed};
}

/// The wedge of camera locations consistent with observing s at pixel q,
/// as two ">=" half-planes (the "<=" edge is stored negated).
inline std::pair<HalfPlane, HalfPlane> point_halfplanes(const CameraModel& cam, double theta,
                                                        Point2 s, const Observation& q) {
  if (!q) throw Error(ErrorCode::kSentinelObservation, "out-of-view observation has no wedge");
  const WedgeCoefficients k = wedge_coefficients(cam, theta, s, *q);
  return {HalfPlane(k.a, k.b, k.c), HalfPlane(-k.a_prime, -k.b_prime, -k.c_prime)};
}

namespace detail {

inline void check_correspondences(std::span<const Point2> points,
                                  std::span<const Observation> observations) {
  if (points.size() != observations.size()) {
    throw std::invalid_argument("points and observations differ in length");
  }
}

inline bool touches_boundary(const ConvexPolygon& region, const ConvexPolygon& world) {
  const auto& w = world.vertices();
  for (const Point2& p : region.vertices()) {
    for (std::size_t i = 0, n = w.size(); i < n; ++i) {
      const Point2 edge = w[(i + 1) % n] - w[i];
      if (std::abs(cross(edge, p - w[i]) / norm(edge)) <= kGeomEps) return true;
    }
  }
  return false;
}

inline ConsistencySlice make_slice(double alpha, ConvexPolygon region, const ConvexPolygon& world) {
  ConsistencySlice slice;
  slice.alpha = alpha;
  slice.area = area(region);
  if (slice.area > kAreaEps) {
    slice.centroid = centroid(region);
    slice.touches_world = touches_boundary(region, world);
  }
  slice.region = std::move(region);
  return slice;
}

inline ConvexPolygon clip_region(const CameraModel& cam, double theta,
                                 std::span<const Point2> points,
                                 std::span<const Observation> observations,
                                 const ConvexPolygon& world, ClipStats& stats) {
  thread_local std::vector<HalfPlane> hps;
  hps.clear();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!observations[i]) continue;
    auto [upper, lower] = point_halfplanes(cam, theta, points[i], observations[i]);
    hps.push_back(upper);
    hps.push_back(lower);
  }
  return intersect_halfplanes(hps, world, stats);
}

inline std::size_t count_constraints(std::span<const Observation> observations) {
  return static_cast<std::size_t>(
      std::count_if(observations.begin(), observations.end(), [](const auto& q) { return q.has_value(); }));
}

}  // namespace detail

/// World box clipped by the wedges of every non-sentinel observation.
inline ConsistencySlice location_region(const CameraModel& cam, double theta,
                                        std::span<const Point2> points,
                                        std::span<const Observation> observations,
                                        const ConvexPolygon& world, ClipStats& stats) {
  detail::check_correspondences(points, observations);
  if (detail::count_constraints(observations) == 0) {
    throw Error(ErrorCode::kNoConstraints, "every observation is out of view");
  }
  return detail::make_slice(
      theta, detail::clip_region(cam, theta, points, observations, world, stats), world);
}

inline ConsistencySlice location_region(const CameraModel& cam, double theta,
                                        std::span<const Point2> points,
                                        std::span<const Observation> observations,
                                        const ConvexPolygon& world = default_world()) {
  ClipStats ignored;
  return location_region(cam, theta, points, observations, world, ignored);
}

/// Centroid of the consistency region for a known orientation.
inline PoseEstimate estimate_location(const CameraModel& cam, double theta,
                                      std::span<const Point2> points,
                                      std::span<const Observation> observations,
                                      const ConvexPolygon& world = default_world()) {
  const ConsistencySlice slice = location_region(cam, theta, points, observations, world);
  if (slice.region.empty()) throw Error(ErrorCode::kEmptyRegion, "observations are inconsistent");
  if (!slice.centroid) throw Error(ErrorCode::kDegenerateRegion, "consistency region has no area");
  return {slice.centroid->x, slice.centroid->z, std::nullopt, slice.touches_world};
}

/// Orientation sweep. The coarse pass samples the full circle to find the
/// band of orientations with a non-empty region; the fine pass samples that
/// band (padded by one coarse step per side) uniformly.
struct SweepConfig {
  int coarse_k = 720;
  int fine_k = 2048;
  /// The coarse pass doubles its sample count up to this limit while it
  /// finds no non-empty slice.
  int max_coarse_k = 720 * 64;
};

/// Area-weighted mean of (centroid, alpha) over the slices. Alphas are used
/// as given, so a band straddling 0 must be passed unwrapped; theta_hat is
/// normalized afterwards. Slices with area <= kAreaEps carry no weight.
inline PoseEstimate combine_slices(std::span<const ConsistencySlice> slices) {
  double total = 0.0;
  double sx = 0.0;
  double sz = 0.0;
  double sa = 0.0;
  bool clipped = false;
  for (const ConsistencySlice& s : slices) {
    if (!s.centroid || !(s.area > kAreaEps)) continue;
    total += s.area;
    sx += s.area * s.centroid->x;
    sz += s.area * s.centroid->z;
    sa += s.area * s.alpha;
    clipped = clipped || s.touches_world;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::kAllSlicesEmpty, "no orientation is consistent");
  return {sx / total, sz / total, normalize_angle(sa / total), clipped};
}

/// Band of orientations, unwrapped so that lo <= hi and hi - lo <= 2π.
struct AngularBand {
  double lo = 0.0;
  double hi = kTwoPi;
  bool full_circle = true;
};

/// Smallest arc covering every flagged sample of a uniform k-sample sweep
/// of the circle, padded by one step on each side.
inline AngularBand covering_band(const std::vector<bool>& non_empty) {
  const std::size_t k = non_empty.size();
  const double step = kTwoPi / static_cast<double>(k);
  std::size_t count = static_cast<std::size_t>(std::count(non_empty.begin(), non_empty.end(), true));
  if (count == 0) throw Error(ErrorCode::kAllSlicesEmpty, "no orientation is consistent");
  if (count == k) return {};

  // Largest run of empty samples, circularly. The band starts right after it.
  std::size_t best_len = 0;
  std::size_t best_end = 0;  // index one past the run
  std::size_t first_full = 0;
  while (!non_empty[first_full]) ++first_full;
  std::size_t run = 0;
  for (std::size_t n = 1; n <= k; ++n) {
    const std::size_t i = (first_full + n) % k;
    if (!non_empty[i]) {
      ++run;
    } else {
      if (run > best_len) {
        best_len = run;
        best_end = i;
      }
      run = 0;
    }
  }
  const std::size_t start = best_end;
  const std::size_t span_samples = k - best_len;  // samples from start to band end, inclusive
  const double lo = static_cast<double>(start) * step - step;
  const double hi = static_cast<double>(start + span_samples - 1) * step + step;
  if (hi - lo >= kTwoPi) return {};
  return {lo, hi, false};
}

namespace detail {

inline std::vector<double> fine_alphas(const AngularBand& band, int fine_k) {
  std::vector<double> alphas(static_cast<std::size_t>(fine_k));
  if (band.full_circle) {
    for (int j = 0; j < fine_k; ++j) alphas[j] = kTwoPi * j / fine_k;
  } else {
    const double step = (band.hi - band.lo) / (fine_k - 1);
    for (int j = 0; j < fine_k; ++j) alphas[j] = band.lo + step * j;
  }
  return alphas;
}

}  // namespace detail

/// Fine-pass slices of the orientation sweep, in increasing alpha order.
inline std::vector<ConsistencySlice> sweep_slices(const CameraModel& cam,
                                                  std::span<const Point2> points,
                                                  std::span<const Observation> observations,
                                                  const ConvexPolygon& world,
                                                  const SweepConfig& sweep) {
  detail::check_correspondences(points, observations);
  if (sweep.coarse_k < 2 || sweep.fine_k < 2) {
    throw std::invalid_argument("sweep sample counts must be at least 2");
  }
  if (detail::count_constraints(observations) == 0) {
    throw Error(ErrorCode::kNoConstraints, "every observation is out of view");
  }

  ClipStats stats;
  std::vector<bool> non_empty;
  bool found = false;
  for (int k = sweep.coarse_k; !found && k <= std::max(sweep.coarse_k, sweep.max_coarse_k); k *= 2) {
    non_empty.assign(static_cast<std::size_t>(k), false);
    for (int i = 0; i < k; ++i) {
      const double alpha = kTwoPi * i / k;
      const ConvexPolygon r = detail::clip_region(cam, alpha, points, observations, world, stats);
      non_empty[i] = area(r) > kAreaEps;
      found = found || non_empty[i];
    }
  }
  const AngularBand band = covering_band(non_empty);

  std::vector<ConsistencySlice> slices;
  slices.reserve(static_cast<std::size_t>(sweep.fine_k));
  for (double alpha : detail::fine_alphas(band, sweep.fine_k)) {
    slices.push_back(detail::make_slice(
        alpha, detail::clip_region(cam, alpha, points, observations, world, stats), world));
  }
  return slices;
}

/// Location and orientation: the approximate centre of mass of the 3-D
/// consistency shape, as the area-weighted mean of the swept slices.
inline PoseEstimate estimate_pose(const CameraModel& cam, std::span<const Point2> points,
                                  std::span<const Observation> observations,
                                  const ConvexPolygon& world = default_world(),
                                  const SweepConfig& sweep = {}) {
  const std::vector<ConsistencySlice> slices = sweep_slices(cam, points, observations, world, sweep);
  return combine_slices(slices);
}

/// Largest camera-to-line distance, f b / (2 w), under which the error for
/// collinear points with spread b decays at least quadratically.
inline double collinear_decay_bound(double focal_length, double spread, double pixel_width) {
  if (!(focal_length > 0.0) || !(spread > 0.0) || !(pixel_width > 0.0)) {
    throw Error(ErrorCode::kNonPositiveInput, "f, b and w must be positive");
  }
  return focal_length * spread / (2.0 * pixel_width);
}

}  // namespace shape
