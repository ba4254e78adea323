#include <cmath>

#include <gtest/gtest.h>

#include "divrbf/error.hpp"
#include "divrbf/harmonics.hpp"
#include "divrbf/harness.hpp"
#include "support/oracles.hpp"

using namespace divrbf;

TEST(BuiltinTarget, UnknownName) { EXPECT_THROW(builtin_target("nope"), Error); }

TEST(BuiltinTarget, GaussiansTangentAndCurlOfStream) {
  for (const bool typo : {false, true}) {
    const auto t = builtin_target("paper-gaussians", typo);
    for (const auto& v : oracle::random_unit_vectors(100, 61)) {
      const Vec3 u = t.field(SpherePoint(v));
      EXPECT_NEAR(v.dot(u), 0.0, 1e-12);
      const Vec3 fd = oracle::surface_curl_fd([&](const Vec3& y) { return t.stream(SpherePoint(y)); }, v, 1e-4);
      EXPECT_LT((fd - u).norm(), 1e-5 * std::max(1.0, u.norm()));
    }
  }
}

TEST(BuiltinTarget, GaussiansStreamValue) {
  // psi at the north pole, summed by hand from the stream function definition.
  const double x = 0, y = 0, z = 1;
  const double expect = -3 * z + 2 * std::exp(-1.5 * ((x - 0.9) * (x - 0.9) + (y + 0.1) * (y + 0.1)) - 8 * (z - 0.2) * (z - 0.2)) +
                        3 * std::exp(-2 * ((x + 0.7) * (x + 0.7) + (y - 0.2) * (y - 0.2)) - 8 * (z - 0.25) * (z - 0.25)) -
                        2.5 * std::exp(-1.1 * ((x + 0.2) * (x + 0.2) + (y - 0.8) * (y - 0.8)) - 8 * (z + 0.19) * (z + 0.19)) -
                        2 * std::exp(-2.2 * ((x + 0.2) * (x + 0.2) + (y + 1) * (y + 1)) - 8 * (z + 0.21) * (z + 0.21));
  EXPECT_NEAR(builtin_target("paper-gaussians").stream(SpherePoint(0, 0, 1)), expect, 1e-15);
  const double literal = expect + 2 * std::exp(-2.2 * (0.04 + 1) - 8 * 1.21 * 1.21) -
                         2 * std::exp(-2.2 * (0.04 + 1) - 8 * (1 + 0.21 * 0.21));
  EXPECT_NEAR(builtin_target("paper-gaussians", true).stream(SpherePoint(0, 0, 1)), literal, 1e-15);
}

TEST(BuiltinTarget, VshLowDegree) {
  const auto t = builtin_target("vsh-lowdegree");
  const SpherePoint p(1, 0, 0);
  const Vec3 expect = -0.48860251190291992 * Vec3(0, 1, 0) + 0.5 * vsh_vector({2, 1}, p);
  EXPECT_LT((t.field(p) - expect).norm(), 1e-15);
  for (const auto& v : oracle::random_unit_vectors(20, 62)) {
    const SpherePoint q(v);
    EXPECT_NEAR(t.stream(q), scalar_Y({1, 0}, q) + 0.5 * scalar_Y({2, 1}, q), 1e-15);
  }
}

TEST(RelativeMaxError, Definition) {
  const std::vector<Vec3> truth{Vec3(0, 1, 0), Vec3(0, 0, 2), Vec3(3, 0, 0)};
  EXPECT_EQ(relative_max_error(truth, truth), 0.0);
  const std::vector<Vec3> zero(3, Vec3::Zero());
  EXPECT_DOUBLE_EQ(relative_max_error(zero, truth), 1.0);
  auto bumped = truth;
  bumped[1] += Vec3(0.25, 0, 0);
  EXPECT_DOUBLE_EQ(relative_max_error(bumped, truth), 0.25 / 3.0);
  try {
    relative_max_error(truth, zero);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateTruth);
  }
}

TEST(StreamError, MeanAlignment) {
  const std::vector<double> truth{1.0, -2.0, 0.5, 3.0};
  std::vector<double> shifted;
  for (const double t : truth) shifted.push_back(t + 7.0);
  EXPECT_NEAR(stream_error(shifted, truth), 0.0, 1e-15);
  EXPECT_EQ(stream_error(truth, truth), 0.0);
  // One spike p among N points: error p (1 - 1/N) / max|truth - mean|, and the
  // farthest truth value from the mean 0.625 is -2.
  auto spiked = truth;
  spiked[2] += 0.4;
  const double mean = (1.0 - 2.0 + 0.5 + 3.0) / 4.0;
  EXPECT_NEAR(stream_error(spiked, truth), 0.4 * (1 - 0.25) / (mean + 2.0), 1e-15);
  EXPECT_THROW(stream_error(truth, std::vector<double>(4, 1.0)), Error);
}

TEST(GeometricRange, EndpointsAndOrder) {
  const auto r = geometric_range(0.01, 2.0, 12);
  ASSERT_EQ(r.size(), 12u);
  EXPECT_EQ(r.front(), 2.0);
  EXPECT_EQ(r.back(), 0.01);
  for (std::size_t i = 1; i < r.size(); ++i) EXPECT_NEAR(r[i] / r[i - 1], r[1] / r[0], 1e-12);
  EXPECT_THROW(geometric_range(0.0, 1.0, 3), Error);
}

TEST(RunSweep, FlatLimitRowAndOrdering) {
  const auto nodes = hammersley_nodes(4);
  const auto report = run_sweep(KernelKind::IMQ, {1e-6, 1.0, 0.1}, nodes, builtin_target("vsh-lowdegree"),
                                hammersley_nodes(16));
  ASSERT_EQ(report.rows.size(), 3u);
  EXPECT_EQ(report.rows[0].epsilon, 1.0);
  EXPECT_EQ(report.rows[2].epsilon, 1e-6);
  ASSERT_TRUE(report.rows[2].err_field_qr);
  EXPECT_LT(*report.rows[2].err_field_qr, 1e-8);
  EXPECT_EQ(report.kernel, "imq");
  EXPECT_EQ(report.n, 4u);
  EXPECT_EQ(report.eval_count, 16u);
}

TEST(RunSweep, SpanEquivalenceRow) {
  const auto nodes = hammersley_nodes(100);
  const auto report = run_sweep(KernelKind::MQ, {2.0}, nodes, builtin_target("paper-gaussians"),
                                hammersley_nodes(400));
  const auto& row = report.rows[0];
  ASSERT_EQ(row.status_direct, "ok");
  ASSERT_EQ(row.status_qr, "ok");
  EXPECT_LT(std::abs(*row.err_field_direct - *row.err_field_qr) / *row.err_field_qr, 1e-3);
  EXPECT_GT(*row.cond_direct, 1.0);
}

TEST(RunSweep, FailuresBecomeStatuses) {
  const auto nodes = hammersley_nodes(100);
  SweepOptions o;
  o.method = Method::Direct;
  const auto report = run_sweep(KernelKind::MQ, {1e-4}, nodes, builtin_target("paper-gaussians"),
                                hammersley_nodes(400), o);
  const auto& row = report.rows[0];
  EXPECT_EQ(row.status_direct, "not_spd");
  EXPECT_FALSE(row.err_field_direct);
  EXPECT_FALSE(row.cond_direct);
  EXPECT_EQ(row.status_qr, "skipped");
}

TEST(RunSweep, Deterministic) {
  const auto nodes = hammersley_nodes(30);
  const auto t = builtin_target("paper-gaussians");
  const auto pts = hammersley_nodes(120);
  const auto a = run_sweep(KernelKind::GA, {1.0, 0.1}, nodes, t, pts);
  const auto b = run_sweep(KernelKind::GA, {1.0, 0.1}, nodes, t, pts);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].err_field_qr, b.rows[i].err_field_qr);
    EXPECT_EQ(a.rows[i].err_field_direct, b.rows[i].err_field_direct);
    EXPECT_EQ(a.rows[i].err_stream_qr, b.rows[i].err_stream_qr);
  }
}

TEST(RunSweep, QrStableTowardFlatLimit) {
  // Square unisolvent set, exact low-degree target: no blow-up as eps shrinks.
  const auto report = run_sweep(KernelKind::MQ, {1.0, 0.1, 0.01, 1e-4, 1e-6}, hammersley_nodes(4),
                                builtin_target("vsh-lowdegree"), hammersley_nodes(16));
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    ASSERT_TRUE(report.rows[i].err_field_qr && report.rows[i - 1].err_field_qr);
    EXPECT_LE(*report.rows[i].err_field_qr, 2.0 * *report.rows[i - 1].err_field_qr + 1e-14);
  }
}
