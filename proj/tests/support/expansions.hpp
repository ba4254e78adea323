#pragma once

// Truncated Mercer sums built from the library's harmonics and coefficients.
// Tests compare them against the closed-form kernel and the analytic matrix
// kernel, which share no code with these sums.

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "divrbf/harmonics.hpp"
#include "divrbf/kernels.hpp"

namespace expansion {

// Smallest degree past which the scaled term bound drops below rel * (largest term).
inline int degree_for(const divrbf::KernelConfig& config, double rel, int cap = 300) {
  double log_max = -INFINITY;
  for (int mu = 1; mu <= cap; ++mu) {
    const double lt = divrbf::log_term_bound(config, mu);
    log_max = std::max(log_max, lt);
    if (mu > 2 && lt < log_max + std::log(rel)) return mu;
  }
  return cap;
}

// sum_mu c_mu eps^{2mu} sum'_nu Y(x) Y(y).
inline double scalar_kernel(const divrbf::KernelConfig& config, const divrbf::SpherePoint& x,
                            const divrbf::SpherePoint& y, int mu_max) {
  const std::size_t m = divrbf::vector_harmonic_count(mu_max);
  std::vector<double> gx(m), hx(m), yx(m), gy(m), hy(m), yy(m);
  divrbf::evaluate_harmonics(mu_max, x, gx, hx, yx);
  divrbf::evaluate_harmonics(mu_max, y, gy, hy, yy);
  const divrbf::HarmonicEnumeration e(1, mu_max);
  // Degree 0: only Y_0^0 = 1/sqrt(4 pi), halved.
  double sum = 0.5 * divrbf::scaled_expansion_coeff(config, 0) / (4.0 * std::numbers::pi);
  for (std::size_t k = 0; k < m; ++k) {
    const auto idx = e.at(k);
    const double w = divrbf::scaled_expansion_coeff(config, idx.mu) * (idx.nu == 0 ? 0.5 : 1.0);
    sum += w * yx[k] * yy[k];
  }
  return sum;
}

// 2x2 block sum_mu c_mu eps^{2mu} sum'_nu [G H](x)^T [G H](y).
inline Eigen::Matrix2d matrix_kernel(const divrbf::KernelConfig& config,
                                     const divrbf::SpherePoint& x, const divrbf::SpherePoint& y,
                                     int mu_max) {
  const std::size_t m = divrbf::vector_harmonic_count(mu_max);
  std::vector<double> gx(m), hx(m), gy(m), hy(m);
  divrbf::evaluate_harmonics(mu_max, x, gx, hx);
  divrbf::evaluate_harmonics(mu_max, y, gy, hy);
  const divrbf::HarmonicEnumeration e(1, mu_max);
  Eigen::Matrix2d out = Eigen::Matrix2d::Zero();
  for (std::size_t k = 0; k < m; ++k) {
    const auto idx = e.at(k);
    const double w = divrbf::scaled_expansion_coeff(config, idx.mu) * (idx.nu == 0 ? 0.5 : 1.0);
    out(0, 0) += w * gx[k] * gy[k];
    out(0, 1) += w * gx[k] * hy[k];
    out(1, 0) += w * hx[k] * gy[k];
    out(1, 1) += w * hx[k] * hy[k];
  }
  return out;
}

}  // namespace expansion
