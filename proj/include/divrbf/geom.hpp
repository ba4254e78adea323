#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace divrbf {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// A point on the unit sphere. Inputs within 1e-8 of unit norm are
// normalized; anything further off is rejected.
class SpherePoint {
 public:
  SpherePoint(double x, double y, double z);
  explicit SpherePoint(const Vec3& v) : SpherePoint(v.x(), v.y(), v.z()) {}

  double x() const { return p_.x(); }
  double y() const { return p_.y(); }
  double z() const { return p_.z(); }
  const Vec3& vec() const { return p_; }

  friend bool operator==(const SpherePoint& a, const SpherePoint& b) {
    return a.p_ == b.p_;
  }

 private:
  Vec3 p_;
};

// Orthonormal frame at a sphere point: a (meridional), b (zonal), n (normal),
// with a = n x b.
struct TangentFrame {
  Vec3 a;
  Vec3 b;
  Vec3 n;
};

// Points with |z| above this use the fixed pole frame.
inline constexpr double kPoleThreshold = 1.0 - 1e-12;

// Q(p), the matrix with Q(p) v = p x v.
Mat3 cross_matrix(const SpherePoint& p);

TangentFrame tangent_frame(const SpherePoint& p);

// comp.first * a + comp.second * b.
Vec3 reconstruct_vector(const TangentFrame& frame, std::pair<double, double> comp);

// Tangent-frame components (a^T v, b^T v).
std::pair<double, double> tangent_components(const TangentFrame& frame, const Vec3& v);

// Base-2 radical inverse of i.
double van_der_corput(std::size_t i);

// Deterministic quasi-uniform nodes: z_i = 1 - (2i+1)/n, longitude
// 2*pi*vdc(i).
std::vector<SpherePoint> hammersley_nodes(std::size_t n);

// Cell-centred latitude/longitude grid (no points on the poles).
std::vector<SpherePoint> latlon_grid(std::size_t nlat, std::size_t nlon);

// Smallest pairwise chordal distance, +inf for fewer than two points.
double min_pairwise_distance(std::span<const SpherePoint> pts);

}  // namespace divrbf
