#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "divrbf/geom.hpp"

namespace divrbf {

struct HarmonicIndex {
  int mu = 0;
  int nu = 0;

  // Throws InvalidInput unless mu >= 0 and |nu| <= mu.
  HarmonicIndex(int mu, int nu);

  friend bool operator==(const HarmonicIndex&, const HarmonicIndex&) = default;
};

// Ordered list of harmonics: ascending degree, and within a degree the
// orders -mu, ..., 0, ..., mu.
class HarmonicEnumeration {
 public:
  HarmonicEnumeration(int mu_min, int mu_max);

  int mu_min() const { return mu_min_; }
  int mu_max() const { return mu_max_; }
  std::size_t size() const;

  std::size_t position(int mu, int nu) const;
  HarmonicIndex at(std::size_t k) const;
  int degree(std::size_t k) const;

 private:
  int mu_min_;
  int mu_max_;
};

// Number of harmonics with 1 <= degree <= mu.
constexpr std::size_t vector_harmonic_count(int mu) {
  return static_cast<std::size_t>(mu) * static_cast<std::size_t>(mu + 2);
}

// P_mu^nu(z) with the Condon-Shortley phase, unnormalized. Overflows for
// large degree; the batch evaluators below work with normalized values.
double assoc_legendre(int mu, int nu, double z);

// Real spherical harmonic: for nu >= 0
//   sqrt((2mu+1)/4pi) sqrt((mu-nu)!/(mu+nu)!) P_mu^nu(z) cos(nu lon),
// and for nu < 0 the same with sin(-nu lon) and P_mu^nu from the reflection
// identity. No sqrt(2) on nonzero orders.
double scalar_Y(const HarmonicIndex& idx, const SpherePoint& p);

// (G, H) = (a^T L Y, b^T L Y) in tangent_frame(p). Requires mu >= 1.
std::pair<double, double> vsh_components(const HarmonicIndex& idx, const SpherePoint& p);

// w = L Y = G a + H b.
Vec3 vsh_vector(const HarmonicIndex& idx, const SpherePoint& p);

// Fills G, H (and Y when non-empty) for all harmonics of degree 1..mu_max in
// enumeration order. Spans must hold vector_harmonic_count(mu_max) values.
void evaluate_harmonics(int mu_max, const SpherePoint& p, std::span<double> G,
                        std::span<double> H, std::span<double> Y = {});

// Row r = harmonic r of the enumeration; columns 2k and 2k+1 hold G and H at
// points[k]. Requires an enumeration starting at degree 1.
Eigen::MatrixXd y_matrix(const HarmonicEnumeration& enumeration,
                         std::span<const SpherePoint> points);

// Scalar harmonic values, rows in enumeration order, one column per point.
Eigen::MatrixXd scalar_y_matrix(const HarmonicEnumeration& enumeration,
                                std::span<const SpherePoint> points);

}  // namespace divrbf
