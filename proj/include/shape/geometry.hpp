#pragma once

// Planar geometry kernel: convex polygons clipped by half-planes.
//
// Coordinates are (x, z) in metres. Polygons are stored counter-clockwise;
// an empty vertex list is the empty polygon and is accepted everywhere.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "shape/error.hpp"

namespace shape {

/// Vertex/side tolerance, metres.
inline constexpr double kGeomEps = 1e-9;
/// Regions with area at or below this are degenerate, square metres.
inline constexpr double kAreaEps = 1e-12;

struct Point2 {
  double x = 0.0;
  double z = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.z + b.z}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.z - b.z}; }
  friend constexpr Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.z}; }
  friend constexpr bool operator==(Point2, Point2) = default;
};

inline double cross(Point2 a, Point2 b) { return a.x * b.z - a.z * b.x; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.z * b.z; }
inline double norm(Point2 p) { return std::hypot(p.x, p.z); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

/// The closed half-plane {(x,z) : a*x + b*z + c >= 0}.
///
/// A "<=" constraint is represented by negating all three coefficients.
class HalfPlane {
 public:
  HalfPlane(double a, double b, double c) : a_(a), b_(b), c_(c) {
    if (a == 0.0 && b == 0.0) {
      throw std::invalid_argument("HalfPlane: normal (a,b) must be non-zero");
    }
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
      throw std::invalid_argument("HalfPlane: non-finite coefficient");
    }
  }

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }

  /// Raw value of a*x + b*z + c.
  double evaluate(Point2 p) const { return a_ * p.x + b_ * p.z + c_; }

  /// Euclidean signed distance to the boundary line, positive inside.
  double signed_distance(Point2 p) const { return evaluate(p) / std::hypot(a_, b_); }

  HalfPlane complement() const { return {-a_, -b_, -c_}; }

 private:
  double a_;
  double b_;
  double c_;
};

class ConvexPolygon {
 public:
  ConvexPolygon() = default;

  /// Takes vertices in counter-clockwise order; clockwise input is reversed.
  /// Duplicate and collinear vertices are merged. Fewer than three surviving
  /// vertices yield the empty polygon.
  explicit ConvexPolygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
    normalize();
  }

  static ConvexPolygon box(double x_min, double x_max, double z_min, double z_max) {
    return ConvexPolygon({{x_min, z_min}, {x_max, z_min}, {x_max, z_max}, {x_min, z_max}});
  }

  /// Square [-half_width, half_width]^2.
  static ConvexPolygon square(double half_width) {
    return box(-half_width, half_width, -half_width, half_width);
  }

  const std::vector<Point2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  bool empty() const { return vertices_.empty(); }
  const Point2& operator[](std::size_t i) const { return vertices_[i]; }

 private:
  friend ConvexPolygon clip(const ConvexPolygon& poly, const HalfPlane& hp);

  struct Unchecked {};
  ConvexPolygon(std::vector<Point2> vertices, Unchecked) : vertices_(std::move(vertices)) {}

  void normalize() {
    if (vertices_.size() >= 3) {
      double twice_area = 0.0;
      for (std::size_t i = 0, n = vertices_.size(); i < n; ++i) {
        twice_area += cross(vertices_[i], vertices_[(i + 1) % n]);
      }
      if (twice_area < 0.0) std::reverse(vertices_.begin(), vertices_.end());
    }
    simplify(vertices_);
  }

 public:
  /// Drops vertices closer than kGeomEps to their predecessor and vertices
  /// lying within kGeomEps of the chord joining their neighbours. Clears the
  /// list when fewer than three vertices remain.
  static void simplify(std::vector<Point2>& v) {
    if (v.empty()) return;
    std::vector<Point2> out;
    out.reserve(v.size());
    for (const Point2& p : v) {
      if (out.empty() || distance(out.back(), p) > kGeomEps) out.push_back(p);
    }
    while (out.size() > 1 && distance(out.front(), out.back()) <= kGeomEps) out.pop_back();

    bool changed = true;
    while (changed && out.size() >= 3) {
      changed = false;
      for (std::size_t i = 0; i < out.size() && out.size() >= 3; ++i) {
        const Point2 prev = out[(i + out.size() - 1) % out.size()];
        const Point2 next = out[(i + 1) % out.size()];
        const Point2 chord = next - prev;
        const double len = norm(chord);
        const double offset = len > 0.0 ? cross(out[i] - prev, chord) / len : 0.0;
        // Reflex or flat vertices (offset <= eps) cannot belong to a CCW convex polygon.
        if (offset <= kGeomEps) {
          out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
          changed = true;
          break;
        }
      }
    }
    if (out.size() < 3) out.clear();
    v = std::move(out);
  }

 private:
  std::vector<Point2> vertices_;
};

/// Intersection of a convex polygon with a half-plane, linear in vertex count.
///
/// Vertices within kGeomEps outside the boundary are kept as-is.
inline ConvexPolygon clip(const ConvexPolygon& poly, const HalfPlane& hp) {
  const auto& in = poly.vertices();
  const std::size_t n = in.size();
  if (n == 0) return {};

  thread_local std::vector<double> dist;
  dist.resize(n);
  bool all_inside = true;
  bool all_outside = true;
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = hp.signed_distance(in[i]);
    if (dist[i] < -kGeomEps) all_inside = false;
    if (dist[i] >= -kGeomEps) all_outside = false;
  }
  if (all_inside) return poly;
  if (all_outside) return {};

  std::vector<Point2> out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const double di = dist[i];
    const double dj = dist[j];
    if (di >= -kGeomEps) out.push_back(in[i]);
    if ((di > kGeomEps && dj < -kGeomEps) || (di < -kGeomEps && dj > kGeomEps)) {
      const double t = di / (di - dj);
      out.push_back(in[i] + t * (in[j] - in[i]));
    }
  }
  ConvexPolygon::simplify(out);
  return ConvexPolygon(std::move(out), ConvexPolygon::Unchecked{});
}

/// Shoelace area; zero for the empty polygon.
inline double area(const ConvexPolygon& poly) {
  const auto& v = poly.vertices();
  if (v.size() < 3) return 0.0;
  // Relative to the first vertex to limit cancellation on small, far-off regions.
  const Point2 o = v[0];
  double twice = 0.0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) twice += cross(v[i] - o, v[i + 1] - o);
  return std::abs(twice) * 0.5;
}

/// Area centroid (centre of mass). The point minimizing the mean squared
/// distance to the region.
inline Point2 centroid(const ConvexPolygon& poly) {
  const auto& v = poly.vertices();
  if (v.size() < 3) throw Error(ErrorCode::kEmptyRegion, "centroid of an empty polygon");
  const Point2 o = v[0];
  double twice = 0.0;
  double cx = 0.0;
  double cz = 0.0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const Point2 p = v[i] - o;
    const Point2 q = v[i + 1] - o;
    const double w = cross(p, q);
    twice += w;
    cx += w * (p.x + q.x);
    cz += w * (p.z + q.z);
  }
  if (std::abs(twice) * 0.5 <= kAreaEps) {
    throw Error(ErrorCode::kDegenerateRegion, "centroid of a degenerate polygon");
  }
  return {o.x + cx / (3.0 * twice), o.z + cz / (3.0 * twice)};
}

/// True iff p is inside or within kGeomEps of the boundary.
inline bool contains(const ConvexPolygon& poly, Point2 p) {
  const auto& v = poly.vertices();
  if (v.size() < 3) return false;
  for (std::size_t i = 0, n = v.size(); i < n; ++i) {
    const Point2 edge = v[(i + 1) % n] - v[i];
    if (cross(edge, p - v[i]) / norm(edge) < -kGeomEps) return false;
  }
  return true;
}

/// Instrumentation for sequential clipping.
struct ClipStats {
  std::size_t clips = 0;
  std::size_t max_vertices = 0;
  std::size_t vertex_work = 0;  // sum of input vertex counts over all clips
};

inline ConvexPolygon intersect_halfplanes(std::span<const HalfPlane> hps,
                                          const ConvexPolygon& bounds, ClipStats& stats) {
  ConvexPolygon region = bounds;
  stats.max_vertices = std::max(stats.max_vertices, region.size());
  for (const HalfPlane& hp : hps) {
    if (region.empty()) break;
    stats.vertex_work += region.size();
    ++stats.clips;
    region = clip(region, hp);
    stats.max_vertices = std::max(stats.max_vertices, region.size());
  }
  return region;
}

/// bounds ∩ every half-plane, by sequential convex clipping.
inline ConvexPolygon intersect_halfplanes(std::span<const HalfPlane> hps,
                                          const ConvexPolygon& bounds) {
  ClipStats ignored;
  return intersect_halfplanes(hps, bounds, ignored);
}

}  // namespace shape
