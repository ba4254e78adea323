#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "divrbf/error.hpp"
#include "divrbf/geom.hpp"
#include "support/oracles.hpp"

using namespace divrbf;

TEST(SpherePoint, NormalizesSmallDeviations) {
  const SpherePoint p(1.0 + 5e-9, 0.0, 0.0);
  EXPECT_NEAR(p.vec().norm(), 1.0, 1e-14);
  const SpherePoint q(0.6, 0.8 * (1 - 1e-9), 0.0);
  EXPECT_NEAR(q.vec().norm(), 1.0, 1e-14);
}

TEST(SpherePoint, RejectsLargeDeviations) {
  EXPECT_THROW(SpherePoint(1.1, 0.0, 0.0), Error);
  EXPECT_THROW(SpherePoint(0.0, 0.0, 0.0), Error);
  EXPECT_THROW(SpherePoint(NAN, 0.0, 1.0), Error);
}

TEST(CrossMatrix, NorthPole) {
  const Mat3 q = cross_matrix(SpherePoint(0, 0, 1));
  Mat3 expected;
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 0;
  EXPECT_EQ(q, expected);
}

TEST(CrossMatrix, ActsAsCrossProduct) {
  const SpherePoint p(1, 0, 0);
  EXPECT_EQ(cross_matrix(p) * Vec3(0, 1, 0), Vec3(0, 0, 1));
  for (const auto& v : oracle::random_unit_vectors(50, 11)) {
    const SpherePoint x(v);
    const Mat3 q = cross_matrix(x);
    EXPECT_LT((q + q.transpose()).norm(), 1e-15);
    EXPECT_LT((q * x.vec()).norm(), 1e-15);
    const Vec3 w(0.3, -1.2, 0.7);
    EXPECT_LT((q * w - x.vec().cross(w)).norm(), 1e-15);
  }
}

TEST(TangentFrame, Equator) {
  const TangentFrame f = tangent_frame(SpherePoint(1, 0, 0));
  EXPECT_LT((f.a - Vec3(0, 0, 1)).norm(), 1e-15);
  EXPECT_LT((f.b - Vec3(0, 1, 0)).norm(), 1e-15);
  EXPECT_LT((f.n - Vec3(1, 0, 0)).norm(), 1e-15);
}

TEST(TangentFrame, PoleFallback) {
  const TangentFrame north = tangent_frame(SpherePoint(0, 0, 1));
  EXPECT_EQ(north.b, Vec3(0, 1, 0));
  EXPECT_LT((north.a - Vec3(-1, 0, 0)).norm(), 1e-15);
  const TangentFrame south = tangent_frame(SpherePoint(0, 0, -1));
  EXPECT_EQ(south.b, Vec3(0, 1, 0));
  EXPECT_LT((south.a - Vec3(1, 0, 0)).norm(), 1e-15);
}

TEST(TangentFrame, OrthonormalRightHanded) {
  auto pts = oracle::random_unit_vectors(200, 12);
  // Points just inside and just past the pole threshold.
  for (const double dz : {1e-11, 1e-12, 1e-13, 1e-15}) {
    const double z = 1.0 - dz;
    const double s = std::sqrt(1.0 - z * z);
    pts.emplace_back(s * 0.6, s * 0.8, z);
    pts.emplace_back(-s, 0.0, -z);
  }
  for (const auto& v : pts) {
    const SpherePoint p(v);
    const TangentFrame f = tangent_frame(p);
    EXPECT_NEAR(f.a.norm(), 1.0, 1e-13);
    EXPECT_NEAR(f.b.norm(), 1.0, 1e-13);
    EXPECT_NEAR(f.a.dot(f.b), 0.0, 1e-13);
    EXPECT_NEAR(f.a.dot(f.n), 0.0, 1e-13);
    EXPECT_NEAR(f.b.dot(f.n), 0.0, 1e-13);
    EXPECT_LT((f.a - f.n.cross(f.b)).norm(), 1e-13);
    EXPECT_EQ(f.n, p.vec());
  }
}

TEST(TangentFrame, MeridionalAndZonalAwayFromPoles) {
  for (const auto& v : oracle::random_unit_vectors(50, 13)) {
    const SpherePoint p(v);
    const TangentFrame f = tangent_frame(p);
    // b points east (no z component), a points north.
    EXPECT_NEAR(f.b.z(), 0.0, 1e-15);
    EXPECT_GT(f.a.z(), 0.0);
  }
}

TEST(ReconstructVector, Basics) {
  const TangentFrame f = tangent_frame(SpherePoint(1, 0, 0));
  EXPECT_LT((reconstruct_vector(f, {1, 0}) - Vec3(0, 0, 1)).norm(), 1e-15);
  EXPECT_EQ(reconstruct_vector(f, {0, 0}), Vec3::Zero());
}

TEST(ReconstructVector, RoundTripTangent) {
  const auto pts = oracle::random_unit_vectors(100, 14);
  const auto dirs = oracle::random_unit_vectors(100, 15);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const SpherePoint p(pts[i]);
    const Vec3 v = 2.5 * (dirs[i] - dirs[i].dot(pts[i]) * pts[i]);
    const TangentFrame f = tangent_frame(p);
    const Vec3 back = reconstruct_vector(f, tangent_components(f, v));
    EXPECT_LT((back - v).norm(), 1e-13);
    EXPECT_NEAR(back.dot(f.n), 0.0, 1e-13);
  }
}

TEST(VanDerCorput, FirstValues) {
  EXPECT_EQ(van_der_corput(0), 0.0);
  EXPECT_EQ(van_der_corput(1), 0.5);
  EXPECT_EQ(van_der_corput(2), 0.25);
  EXPECT_EQ(van_der_corput(3), 0.75);
  EXPECT_EQ(van_der_corput(6), 0.375);
}

TEST(Hammersley, SmallSets) {
  const auto one = hammersley_nodes(1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].z(), 0.0);
  const auto two = hammersley_nodes(2);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_DOUBLE_EQ(two[0].z(), 0.5);
  EXPECT_DOUBLE_EQ(two[1].z(), -0.5);
}

TEST(Hammersley, DeterministicDistinctUnit) {
  const auto a = hammersley_nodes(924);
  const auto b = hammersley_nodes(924);
  ASSERT_EQ(a.size(), 924u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(a[i] == b[i]);
    EXPECT_NEAR(a[i].vec().norm(), 1.0, 1e-14);
    EXPECT_NEAR(a[i].z(), 1.0 - (2.0 * i + 1.0) / 924.0, 1e-15);
  }
  EXPECT_GT(min_pairwise_distance(a), 0.0);
}

TEST(Hammersley, RejectsZero) { EXPECT_THROW(hammersley_nodes(0), Error); }

TEST(LatLonGrid, ShapeAndNoPoles) {
  const auto g = latlon_grid(10, 20);
  ASSERT_EQ(g.size(), 200u);
  for (const auto& p : g) EXPECT_LT(std::abs(p.z()), 1.0 - 1e-3);
  EXPECT_GT(min_pairwise_distance(g), 0.0);
}

TEST(MinPairwiseDistance, Simple) {
  const std::vector<SpherePoint> pts{SpherePoint(1, 0, 0), SpherePoint(0, 1, 0),
                                     SpherePoint(-1, 0, 0)};
  EXPECT_NEAR(min_pairwise_distance(pts), std::sqrt(2.0), 1e-15);
  EXPECT_TRUE(std::isinf(min_pairwise_distance(std::span(pts).first(1))));
}
