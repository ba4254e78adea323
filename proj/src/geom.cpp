#include "divrbf/geom.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "divrbf/error.hpp"

namespace divrbf {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid_input";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::NotPositiveDefinite: return "not_spd";
    case ErrorCode::SingularSystem: return "singular";
    case ErrorCode::NotUnisolvent: return "not_unisolvent";
    case ErrorCode::TruncationCapExceeded: return "cap_exceeded";
    case ErrorCode::SeriesNonconvergence: return "series_nonconvergence";
    case ErrorCode::DegenerateTruth: return "degenerate_truth";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

SpherePoint::SpherePoint(double x, double y, double z) : p_(x, y, z) {
  const double norm = p_.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-8) {
    std::ostringstream os;
    os << "point (" << x << ", " << y << ", " << z << ") is not on the unit sphere (norm "
       << norm << ")";
    throw Error(ErrorCode::InvalidInput, os.str());
  }
  // Points already unit to rounding are kept bit-for-bit so text round trips are exact.
  if (std::abs(norm - 1.0) > 4 * std::numeric_limits<double>::epsilon()) p_ /= norm;
}

Mat3 cross_matrix(const SpherePoint& p) {
  Mat3 q;
  // clang-format off
  q <<  0.0,    -p.z(),  p.y(),
        p.z(),   0.0,   -p.x(),
       -p.y(),   p.x(),  0.0;
  // clang-format on
  return q;
}

TangentFrame tangent_frame(const SpherePoint& p) {
  TangentFrame f;
  f.n = p.vec();
  if (std::abs(p.z()) > kPoleThreshold) {
    // y-axis, projected onto the tangent plane; exactly (0,1,0) at the poles.
    f.b = Vec3(0.0, 1.0, 0.0) - p.y() * f.n;
    f.b.normalize();
    f.a = f.n.cross(f.b);
    return f;
  }
  const double s2 = 1.0 - p.z() * p.z();
  const double s = std::sqrt(s2);
  f.a = Vec3(-p.z() * p.x(), -p.z() * p.y(), s2) / s;
  f.b = Vec3(-p.y(), p.x(), 0.0) / s;
  return f;
}

Vec3 reconstruct_vector(const TangentFrame& frame, std::pair<double, double> comp) {
  return comp.first * frame.a + comp.second * frame.b;
}

std::pair<double, double> tangent_components(const TangentFrame& frame, const Vec3& v) {
  return {frame.a.dot(v), frame.b.dot(v)};
}

double van_der_corput(std::size_t i) {
  double result = 0.0;
  double scale = 0.5;
  while (i != 0) {
    if (i & 1u) result += scale;
    i >>= 1u;
    scale *= 0.5;
  }
  return result;
}

std::vector<SpherePoint> hammersley_nodes(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidInput, "hammersley_nodes: n must be positive");
  std::vector<SpherePoint> pts;
  pts.reserve(n);
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / dn;
    const double lon = 2.0 * std::numbers::pi * van_der_corput(i);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    pts.emplace_back(s * std::cos(lon), s * std::sin(lon), z);
  }
  return pts;
}

std::vector<SpherePoint> latlon_grid(std::size_t nlat, std::size_t nlon) {
  if (nlat == 0 || nlon == 0) throw Error(ErrorCode::InvalidInput, "latlon_grid: empty grid");
  std::vector<SpherePoint> pts;
  pts.reserve(nlat * nlon);
  for (std::size_t i = 0; i < nlat; ++i) {
    const double colat = std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(nlat);
    for (std::size_t j = 0; j < nlon; ++j) {
      const double lon = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(nlon);
      pts.emplace_back(std::sin(colat) * std::cos(lon), std::sin(colat) * std::sin(lon),
                       std::cos(colat));
    }
  }
  return pts;
}

double min_pairwise_distance(std::span<const SpherePoint> pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      best = std::min(best, (pts[i].vec() - pts[j].vec()).norm());
  return best;
}

}  // namespace divrbf
