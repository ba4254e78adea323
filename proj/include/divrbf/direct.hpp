#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "divrbf/geom.hpp"
#include "divrbf/kernels.hpp"

namespace divrbf {

using Components = std::pair<double, double>;

// Nodes with tangent-frame components (gamma_i, delta_i) = (a_i^T u_i, b_i^T u_i).
struct TangentFieldSamples {
  std::vector<SpherePoint> nodes;
  std::vector<Components> comps;

  // Throws InvalidInput on a size mismatch or (near-)duplicate nodes.
  void validate() const;

  // Projects 3-vectors onto each node's tangent frame. Vectors must be
  // tangent within 1e-8 relative.
  static TangentFieldSamples from_vectors(std::vector<SpherePoint> nodes,
                                          std::span<const Vec3> vectors);

  // Interleaved right-hand side (gamma_0, delta_0, gamma_1, ...).
  Eigen::VectorXd rhs() const;
};

// The 3x3 divergence-free kernel Q(x) (Hessian of phi) Q(y).
Mat3 div_free_kernel(const KernelConfig& config, const SpherePoint& x, const SpherePoint& y);

// Tangent-frame block [a_x b_x]^T Phi_div(x, y) [a_y b_y].
Eigen::Matrix2d kernel_block(const KernelConfig& config, const SpherePoint& x,
                             const SpherePoint& y);

// 2n x 2n interpolation matrix of 2x2 kernel blocks.
Eigen::MatrixXd assemble_system(const KernelConfig& config, std::span<const SpherePoint> nodes);

class DirectInterpolant {
 public:
  DirectInterpolant(KernelConfig config, std::vector<SpherePoint> nodes,
                    std::vector<Components> coeffs, double residual, double rcond);

  const KernelConfig& config() const { return config_; }
  const std::vector<SpherePoint>& nodes() const { return nodes_; }
  const std::vector<TangentFrame>& frames() const { return frames_; }
  // (alpha_j, beta_j): kernel weights c_j = alpha_j a_j + beta_j b_j.
  const std::vector<Components>& coeffs() const { return coeffs_; }
  // max |A c - rhs| / max |rhs| at fit time.
  double residual() const { return residual_; }
  // Reciprocal condition estimate of the (sign-normalized) system matrix.
  double rcond() const { return rcond_; }

  Vec3 eval(const SpherePoint& x) const;
  double stream(const SpherePoint& x) const;

 private:
  KernelConfig config_;
  std::vector<SpherePoint> nodes_;
  std::vector<TangentFrame> frames_;
  std::vector<Components> coeffs_;
  std::vector<Vec3> weights_;  // y_j x c_j
  double residual_;
  double rcond_;
};

// Cholesky solve of definiteness_sign * A. Throws NotPositiveDefinite when
// the factorization breaks down, which happens for small eps.
DirectInterpolant fit_direct(const KernelConfig& config, const TangentFieldSamples& samples);

inline Vec3 eval_direct(const DirectInterpolant& interp, const SpherePoint& x) {
  return interp.eval(x);
}

// psi(x) = sum_j grad phi(|x - y_j|)^T Q(y_j) c_j, with L psi = eval_direct.
inline double stream_direct(const DirectInterpolant& interp, const SpherePoint& x) {
  return interp.stream(x);
}

}  // namespace divrbf
