#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "shape/geometry.hpp"
#include "test_support.hpp"

using namespace shape;

namespace {

ConvexPolygon unit_square() { return ConvexPolygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

void expect_same_polygon(const ConvexPolygon& a, const ConvexPolygon& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  // Same cyclic sequence, possibly rotated.
  for (std::size_t shift = 0; shift < a.size(); ++shift) {
    bool match = true;
    for (std::size_t i = 0; i < a.size() && match; ++i) {
      match = distance(a[i], b[(i + shift) % b.size()]) <= tol;
    }
    if (match) return;
  }
  ADD_FAILURE() << "polygons differ";
}

bool is_ccw_convex(const ConvexPolygon& p) {
  const auto& v = p.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2 a = v[i], b = v[(i + 1) % v.size()], c = v[(i + 2) % v.size()];
    if (cross(b - a, c - b) <= 0.0) return false;
  }
  return true;
}

}  // namespace

TEST(HalfPlane, RejectsZeroNormal) {
  EXPECT_THROW(HalfPlane(0.0, 0.0, 1.0), std::invalid_argument);
  EXPECT_NO_THROW(HalfPlane(0.0, 1.0, 0.0));
}

TEST(HalfPlane, SignedDistanceIsEuclidean) {
  const HalfPlane h(3.0, 4.0, -5.0);  // 3x + 4z >= 5
  EXPECT_NEAR(h.signed_distance({0.0, 0.0}), -1.0, 1e-15);
  EXPECT_NEAR(h.complement().signed_distance({0.0, 0.0}), 1.0, 1e-15);
}

TEST(ConvexPolygon, ReversesClockwiseAndDropsCollinear) {
  const ConvexPolygon p({{0, 1}, {1, 1}, {1, 0}, {0.5, 0}, {0, 0}});
  ASSERT_EQ(p.size(), 4u);
  EXPECT_TRUE(is_ccw_convex(p));
  EXPECT_DOUBLE_EQ(area(p), 1.0);
}

TEST(ConvexPolygon, DegenerateInputIsEmpty) {
  EXPECT_TRUE(ConvexPolygon({{0, 0}, {1, 1}, {2, 2}}).empty());
  EXPECT_TRUE(ConvexPolygon({{0, 0}, {1, 0}}).empty());
}

TEST(Clip, AxisAlignedCut) {
  const ConvexPolygon r = clip(unit_square(), HalfPlane(1.0, 0.0, -0.5));
  expect_same_polygon(r, ConvexPolygon({{0.5, 0}, {1, 0}, {1, 1}, {0.5, 1}}), 1e-15);
}

TEST(Clip, ContainingHalfPlaneIsIdentity) {
  const ConvexPolygon r = clip(unit_square(), HalfPlane(1.0, 1.0, 5.0));
  expect_same_polygon(r, unit_square(), 0.0);
}

TEST(Clip, DisjointHalfPlaneEmpties) {
  EXPECT_TRUE(clip(unit_square(), HalfPlane(1.0, 1.0, -3.0)).empty());
}

TEST(Clip, EmptyInputStaysEmpty) { EXPECT_TRUE(clip(ConvexPolygon{}, HalfPlane(1, 0, 0)).empty()); }

TEST(Clip, DiagonalCutMakesTriangle) {
  // x + z <= 1
  const ConvexPolygon r = clip(unit_square(), HalfPlane(-1.0, -1.0, 1.0));
  EXPECT_EQ(r.size(), 3u);
  EXPECT_NEAR(area(r), 0.5, 1e-15);
}

TEST(Area, Examples) {
  EXPECT_DOUBLE_EQ(area(unit_square()), 1.0);
  EXPECT_DOUBLE_EQ(area(ConvexPolygon{}), 0.0);
  EXPECT_DOUBLE_EQ(area(ConvexPolygon({{0, 0}, {2, 0}, {0, 2}})), 2.0);
}

TEST(Centroid, Examples) {
  const Point2 c = centroid(unit_square());
  EXPECT_DOUBLE_EQ(c.x, 0.5);
  EXPECT_DOUBLE_EQ(c.z, 0.5);
  const Point2 t = centroid(ConvexPolygon({{0, 0}, {3, 0}, {0, 3}}));
  EXPECT_NEAR(t.x, 1.0, 1e-15);
  EXPECT_NEAR(t.z, 1.0, 1e-15);
}

TEST(Centroid, EmptyOrDegenerateThrows) {
  try {
    centroid(ConvexPolygon{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyRegion);
  }
  // 1e-7 x 1e-7 square: valid polygon, area below the degenerate threshold.
  const ConvexPolygon tiny = ConvexPolygon::box(0, 1e-7, 0, 1e-7);
  ASSERT_FALSE(tiny.empty());
  try {
    centroid(tiny);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateRegion);
  }
}

TEST(Centroid, MatchesMonteCarloOracle) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 5; ++k) {
    const ConvexPolygon p = fixtures::random_ellipse_polygon(rng, 5 + k * 3);
    const Point2 mc = fixtures::monte_carlo_centroid(p.vertices(), rng, 1'000'000);
    const Point2 c = centroid(p);
    EXPECT_NEAR(c.x, mc.x, 1e-3);
    EXPECT_NEAR(c.z, mc.z, 1e-3);
  }
}

TEST(Centroid, MinimizesMeanSquaredDistance) {
  // The centroid beats nearby candidates on the mean squared distance to a
  // fixed sample of the region.
  std::mt19937_64 rng(5);
  const ConvexPolygon p = fixtures::random_ellipse_polygon(rng, 9);
  std::vector<Point2> sample;
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  while (sample.size() < 20000) {
    const Point2 q{u(rng), u(rng)};
    if (contains(p, q)) sample.push_back(q);
  }
  Point2 mean{};
  for (const Point2& q : sample) mean = mean + (1.0 / sample.size()) * q;
  auto msd = [&](Point2 c) {
    double s = 0.0;
    for (const Point2& q : sample) s += dot(q - c, q - c);
    return s / sample.size();
  };
  const Point2 c = centroid(p);
  EXPECT_LT(distance(c, mean), 0.02);
  for (Point2 d : {Point2{0.05, 0}, Point2{-0.05, 0}, Point2{0, 0.05}, Point2{0, -0.05}}) {
    EXPECT_LT(msd(c), msd(c + d));
  }
}

TEST(Contains, Examples) {
  EXPECT_TRUE(contains(unit_square(), {0.5, 0.5}));
  EXPECT_FALSE(contains(unit_square(), {2.0, 2.0}));
  EXPECT_TRUE(contains(unit_square(), {1.0 + 0.5e-9, 0.5}));
  EXPECT_FALSE(contains(unit_square(), {1.0 + 1e-8, 0.5}));
  EXPECT_FALSE(contains(ConvexPolygon{}, {0.0, 0.0}));
}

TEST(IntersectHalfplanes, NoConstraintsIsBounds) {
  const ConvexPolygon box = ConvexPolygon::square(10.0);
  expect_same_polygon(intersect_halfplanes({}, box), box, 0.0);
}

TEST(IntersectHalfplanes, MeasureZeroIntersectionIsEmpty) {
  const std::vector<HalfPlane> hps{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
  const ConvexPolygon r = intersect_halfplanes(hps, ConvexPolygon::square(100.0));
  EXPECT_TRUE(r.empty());
  EXPECT_LE(area(r), kAreaEps);
}

TEST(IntersectHalfplanes, VerticesSatisfyAllConstraintsAndAgreeWithGrid) {
  std::mt19937_64 rng(3);
  const ConvexPolygon box = ConvexPolygon::square(1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<HalfPlane> hps;
    for (int k = 0; k < 12; ++k) hps.push_back(fixtures::random_halfplane(rng, {0.1, -0.1}, -0.2, 0.8));
    const ConvexPolygon r = intersect_halfplanes(hps, box);
    EXPECT_TRUE(r.empty() || is_ccw_convex(r));
    for (const Point2& v : r.vertices()) {
      for (const HalfPlane& h : hps) EXPECT_GE(h.signed_distance(v), -kGeomEps);
    }
    // Grid membership against the raw constraints, skipping cells within a
    // small band of any boundary.
    const int n = 200;
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const Point2 p{-1.0 + 2.0 * i / n, -1.0 + 2.0 * j / n};
        bool inside = std::abs(p.x) <= 1.0 && std::abs(p.z) <= 1.0;
        double margin = std::min(1.0 - std::abs(p.x), 1.0 - std::abs(p.z));
        for (const HalfPlane& h : hps) {
          const double d = h.signed_distance(p);
          inside = inside && d >= 0.0;
          margin = std::min(margin, std::abs(d));
        }
        if (margin < 1e-6) continue;
        ASSERT_EQ(contains(r, p), inside) << "trial " << trial << " at " << p.x << "," << p.z;
      }
    }
  }
}

// Properties over random polygons and half-planes.
class GeometryProperties : public ::testing::TestWithParam<int> {};

TEST_P(GeometryProperties, ClipIsIdempotentAndShrinksArea) {
  std::mt19937_64 rng(GetParam());
  const ConvexPolygon p = fixtures::random_ellipse_polygon(rng, 12);
  for (int k = 0; k < 20; ++k) {
    const HalfPlane h = fixtures::random_halfplane(rng, {0.0, 0.0}, -2.0, 2.0);
    const ConvexPolygon once = clip(p, h);
    const ConvexPolygon twice = clip(once, h);
    EXPECT_LE(area(once), area(p) + 1e-12);
    ASSERT_EQ(once.size(), twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) EXPECT_LE(distance(once[i], twice[i]), kGeomEps);
    if (area(once) > kAreaEps) {
      EXPECT_TRUE(contains(once, centroid(once)));
    }
  }
}

TEST_P(GeometryProperties, IntersectionIsOrderInvariant) {
  std::mt19937_64 rng(100 + GetParam());
  std::vector<HalfPlane> hps;
  for (int k = 0; k < 30; ++k) hps.push_back(fixtures::random_halfplane(rng, {0.0, 0.0}, 0.05, 1.0));
  const ConvexPolygon box = ConvexPolygon::square(5.0);
  const ConvexPolygon ref = intersect_halfplanes(hps, box);
  ASSERT_GT(area(ref), kAreaEps);
  for (int shuffle = 0; shuffle < 5; ++shuffle) {
    std::shuffle(hps.begin(), hps.end(), rng);
    const ConvexPolygon r = intersect_halfplanes(hps, box);
    EXPECT_NEAR(area(r), area(ref), kAreaEps);
    EXPECT_LE(distance(centroid(r), centroid(ref)), kGeomEps);
  }
}

TEST_P(GeometryProperties, IntermediateVertexCountStaysBounded) {
  std::mt19937_64 rng(200 + GetParam());
  std::vector<HalfPlane> hps;
  for (int k = 0; k < 2000; ++k) hps.push_back(fixtures::random_halfplane(rng, {0.3, 0.2}, 0.01, 3.0));
  ClipStats stats;
  const ConvexPolygon r = intersect_halfplanes(hps, ConvexPolygon::square(50.0), stats);
  EXPECT_FALSE(r.empty());
  EXPECT_LE(stats.max_vertices, 64u);
  EXPECT_EQ(stats.clips, hps.size());
}

INSTANTIATE_TEST_SUITE_P(Seeds, GeometryProperties, ::testing::Range(1, 9));
