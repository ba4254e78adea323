#include "divrbf/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "divrbf/error.hpp"

namespace divrbf {

namespace {

constexpr double kInvSqrt4Pi = 0.28209479177387814347;  // 1/sqrt(4 pi)

std::size_t tri(int l, int m) { return static_cast<std::size_t>(l) * (l + 1) / 2 + m; }

// Cosine of the colatitude, sine of the colatitude, and longitude. At the
// exact poles the longitude is pinned to 0 so that the limits taken below
// line up with the fixed pole frame.
struct SphericalCoords {
  double z;
  double s;
  double lon;
};

SphericalCoords spherical(const SpherePoint& p) {
  const double s = std::hypot(p.x(), p.y());
  return {p.z(), s, s == 0.0 ? 0.0 : std::atan2(p.y(), p.x())};
}

// Normalized associated Legendre values
//   Pbar_l^m = sqrt((2l+1)/4pi (l-m)!/(l+m)!) P_l^m
// for l = m..lmax, scaled by s^-shift (shift 0 or 1, the latter only for
// m >= 1). out must hold lmax - m + 1 values.
void legendre_column(int m, int lmax, double z, double s, int shift, double* out) {
  double diag = kInvSqrt4Pi;
  for (int k = 1; k <= m; ++k) {
    diag *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k));
    if (k > shift) diag *= s;
  }
  out[0] = diag;
  if (lmax == m) return;
  out[1] = std::sqrt(2.0 * m + 3.0) * z * diag;
  const double mm = static_cast<double>(m) * m;
  for (int l = m + 2; l <= lmax; ++l) {
    const double ll = static_cast<double>(l) * l;
    const double lm1 = static_cast<double>(l - 1) * (l - 1);
    const double a = std::sqrt((4.0 * ll - 1.0) / (ll - mm));
    const double b = std::sqrt((lm1 - mm) / (4.0 * lm1 - 1.0));
    out[l - m] = a * (z * out[l - m - 1] - b * out[l - m - 2]);
  }
}

void check_span(std::span<double> s, std::size_t need, const char* name) {
  if (!s.empty() && s.size() < need) {
    std::ostringstream os;
    os << "evaluate_harmonics: span '" << name << "' holds " << s.size() << " values, need "
       << need;
    throw Error(ErrorCode::InvalidInput, os.str());
  }
}

}  // namespace

HarmonicIndex::HarmonicIndex(int mu_, int nu_) : mu(mu_), nu(nu_) {
  if (mu < 0 || nu < -mu || nu > mu) {
    std::ostringstream os;
    os << "invalid harmonic index (mu=" << mu << ", nu=" << nu << ")";
    throw Error(ErrorCode::InvalidInput, os.str());
  }
}

HarmonicEnumeration::HarmonicEnumeration(int mu_min, int mu_max)
    : mu_min_(mu_min), mu_max_(mu_max) {
  if (mu_min < 0 || mu_max < mu_min)
    throw Error(ErrorCode::InvalidInput, "HarmonicEnumeration: need 0 <= mu_min <= mu_max");
}

std::size_t HarmonicEnumeration::size() const {
  return static_cast<std::size_t>((mu_max_ + 1) * (mu_max_ + 1) - mu_min_ * mu_min_);
}

std::size_t HarmonicEnumeration::position(int mu, int nu) const {
  if (mu < mu_min_ || mu > mu_max_ || nu < -mu || nu > mu)
    throw Error(ErrorCode::InvalidInput, "HarmonicEnumeration::position: index out of range");
  return static_cast<std::size_t>(mu * mu - mu_min_ * mu_min_ + mu + nu);
}

int HarmonicEnumeration::degree(std::size_t k) const {
  // Largest mu with mu^2 - mu_min^2 <= k.
  const auto target = static_cast<double>(k + static_cast<std::size_t>(mu_min_ * mu_min_));
  int mu = static_cast<int>(std::sqrt(target));
  while (static_cast<std::size_t>(mu * mu) > k + static_cast<std::size_t>(mu_min_ * mu_min_)) --mu;
  while (static_cast<std::size_t>((mu + 1) * (mu + 1)) <= k + static_cast<std::size_t>(mu_min_ * mu_min_)) ++mu;
  if (mu > mu_max_) throw Error(ErrorCode::InvalidInput, "HarmonicEnumeration::degree: out of range");
  return mu;
}

HarmonicIndex HarmonicEnumeration::at(std::size_t k) const {
  const int mu = degree(k);
  const int nu = static_cast<int>(k + static_cast<std::size_t>(mu_min_ * mu_min_)) - mu * mu - mu;
  return {mu, nu};
}

double assoc_legendre(int mu, int nu, double z) {
  if (nu < 0 || nu > mu) throw Error(ErrorCode::InvalidInput, "assoc_legendre: need 0 <= nu <= mu");
  if (!(std::abs(z) <= 1.0 + 1e-12)) {
    std::ostringstream os;
    os << "assoc_legendre: z = " << z << " outside [-1, 1]";
    throw Error(ErrorCode::Domain, os.str());
  }
  z = std::clamp(z, -1.0, 1.0);
  const double s = std::sqrt((1.0 - z) * (1.0 + z));
  double pmm = 1.0;
  for (int k = 1; k <= nu; ++k) pmm *= -(2.0 * k - 1.0) * s;
  if (mu == nu) return pmm;
  double prev = pmm;
  double cur = z * (2.0 * nu + 1.0) * pmm;
  for (int l = nu + 2; l <= mu; ++l) {
    const double next = ((2.0 * l - 1.0) * z * cur - (l + nu - 1.0) * prev) / (l - nu);
    prev = cur;
    cur = next;
  }
  return cur;
}

double scalar_Y(const HarmonicIndex& idx, const SpherePoint& p) {
  const auto [z, s, lon] = spherical(p);
  const int m = std::abs(idx.nu);
  std::vector<double> col(static_cast<std::size_t>(idx.mu - m + 1));
  legendre_column(m, idx.mu, z, s, 0, col.data());
  const double pbar = col.back();
  if (idx.nu >= 0) return pbar * std::cos(m * lon);
  return (m % 2 == 0 ? 1.0 : -1.0) * pbar * std::sin(m * lon);
}

void evaluate_harmonics(int mu_max, const SpherePoint& p, std::span<double> G,
                        std::span<double> H, std::span<double> Y) {
  if (mu_max < 1) throw Error(ErrorCode::InvalidInput, "evaluate_harmonics: mu_max must be >= 1");
  const std::size_t count = vector_harmonic_count(mu_max);
  check_span(G, count, "G");
  check_span(H, count, "H");
  check_span(Y, count, "Y");
  if (G.empty() || H.empty())
    throw Error(ErrorCode::InvalidInput, "evaluate_harmonics: G and H are required");

  const auto [z, s, lon] = spherical(p);
  const int L = mu_max;

  // pbar(l, m) and pbar(l, m) / s, triangular storage; orders up to L.
  std::vector<double> pbar(tri(L, L) + 1, 0.0);
  std::vector<double> pbar_s(tri(L, L) + 1, 0.0);
  std::vector<double> col(static_cast<std::size_t>(L + 1));
  for (int m = 0; m <= L; ++m) {
    legendre_column(m, L, z, s, 0, col.data());
    for (int l = m; l <= L; ++l) pbar[tri(l, m)] = col[l - m];
    if (m >= 1) {
      legendre_column(m, L, z, s, 1, col.data());
      for (int l = m; l <= L; ++l) pbar_s[tri(l, m)] = col[l - m];
    }
  }

  std::vector<double> cosm(static_cast<std::size_t>(L + 1));
  std::vector<double> sinm(static_cast<std::size_t>(L + 1));
  for (int m = 0; m <= L; ++m) {
    cosm[m] = std::cos(m * lon);
    sinm[m] = std::sin(m * lon);
  }

  for (int l = 1; l <= L; ++l) {
    const std::size_t base = static_cast<std::size_t>(l * l - 1 + l);
    for (int m = 0; m <= l; ++m) {
      // d/dtheta of pbar(l, m)(cos theta), mixing neighbouring orders.
      double dtheta;
      if (m == 0) {
        dtheta = std::sqrt(static_cast<double>(l) * (l + 1)) * pbar[tri(l, 1)];
      } else {
        const double up = m < l ? std::sqrt(static_cast<double>(l - m) * (l + m + 1)) * pbar[tri(l, m + 1)] : 0.0;
        const double down = std::sqrt(static_cast<double>(l + m) * (l - m + 1)) * pbar[tri(l, m - 1)];
        dtheta = 0.5 * (up - down);
      }
      const double v = pbar[tri(l, m)];
      const double vs = m > 0 ? pbar_s[tri(l, m)] : 0.0;
      const std::size_t kp = base + m;
      G[kp] = -m * vs * sinm[m];
      H[kp] = dtheta * cosm[m];
      if (!Y.empty()) Y[kp] = v * cosm[m];
      if (m > 0) {
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        const std::size_t kn = base - m;
        G[kn] = sign * m * vs * cosm[m];
        H[kn] = sign * dtheta * sinm[m];
        if (!Y.empty()) Y[kn] = sign * v * sinm[m];
      }
    }
  }

  // Close to (but not at) a pole the frame is the fixed fallback rather than
  // the spherical one; rotate the components into it.
  if (s > 0.0 && std::abs(z) > kPoleThreshold) {
    const Vec3 a_loc = Vec3(-z * p.x(), -z * p.y(), s * s) / s;
    const Vec3 b_loc = Vec3(-p.y(), p.x(), 0.0) / s;
    const TangentFrame f = tangent_frame(p);
    const double aa = f.a.dot(a_loc), ab = f.a.dot(b_loc);
    const double ba = f.b.dot(a_loc), bb = f.b.dot(b_loc);
    for (std::size_t k = 0; k < count; ++k) {
      const double g = G[k], h = H[k];
      G[k] = aa * g + ab * h;
      H[k] = ba * g + bb * h;
    }
  }
}

std::pair<double, double> vsh_components(const HarmonicIndex& idx, const SpherePoint& p) {
  if (idx.mu < 1) throw Error(ErrorCode::InvalidInput, "vsh_components: mu must be >= 1");
  const std::size_t count = vector_harmonic_count(idx.mu);
  std::vector<double> g(count), h(count);
  evaluate_harmonics(idx.mu, p, g, h);
  const auto k = static_cast<std::size_t>(idx.mu * idx.mu - 1 + idx.mu + idx.nu);
  return {g[k], h[k]};
}

Vec3 vsh_vector(const HarmonicIndex& idx, const SpherePoint& p) {
  return reconstruct_vector(tangent_frame(p), vsh_components(idx, p));
}

Eigen::MatrixXd y_matrix(const HarmonicEnumeration& enumeration,
                         std::span<const SpherePoint> points) {
  if (enumeration.mu_min() != 1)
    throw Error(ErrorCode::InvalidInput, "y_matrix: enumeration must start at degree 1");
  const std::size_t m = enumeration.size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(2 * points.size()));
  std::vector<double> g(m), h(m);
  for (std::size_t k = 0; k < points.size(); ++k) {
    evaluate_harmonics(enumeration.mu_max(), points[k], g, h);
    out.col(2 * k) = Eigen::Map<const Eigen::VectorXd>(g.data(), m);
    out.col(2 * k + 1) = Eigen::Map<const Eigen::VectorXd>(h.data(), m);
  }
  return out;
}

Eigen::MatrixXd scalar_y_matrix(const HarmonicEnumeration& enumeration,
                                std::span<const SpherePoint> points) {
  if (enumeration.mu_min() != 1)
    throw Error(ErrorCode::InvalidInput, "scalar_y_matrix: enumeration must start at degree 1");
  const std::size_t m = enumeration.size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(points.size()));
  std::vector<double> g(m), h(m), y(m);
  for (std::size_t k = 0; k < points.size(); ++k) {
    evaluate_harmonics(enumeration.mu_max(), points[k], g, h, y);
    out.col(k) = Eigen::Map<const Eigen::VectorXd>(y.data(), m);
  }
  return out;
}

}  // namespace divrbf
