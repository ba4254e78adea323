#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "divrbf/direct.hpp"
#include "divrbf/geom.hpp"
#include "divrbf/harmonics.hpp"
#include "divrbf/kernels.hpp"

namespace divrbf {

// Vector RBF-QR.
//
// The shifted kernels, written in tangent-frame components, factor as
// B E Y(x): B holds c_mu-weighted (G, H) values at the nodes (2n x m), E the
// powers eps^{2mu}, and Y(x) the (G, H) values at the evaluation point. A QR
// factorization B = Q [R1 | R2] without pivoting gives the equivalent basis
//
//   [I | (R1^{-1} R2) o Etilde] Y(x),   Etilde_ij = eps^{2(deg col - deg row)},
//
// in which every eps power is nonnegative. Columns stay in degree order, so
// the exponents never go negative even when R1 straddles a degree.

// 2n x m. Row pair (2i, 2i+1) holds c_mu (G, H) at node i; order-zero columns
// carry c_mu / 2.
Eigen::MatrixXd assemble_B(const KernelConfig& config, std::span<const SpherePoint> nodes,
                           const TruncationPlan& plan);

// (i, j) -> 2 (deg(2n + j) - deg(i)).
Eigen::MatrixXi epsilon_exponents(const TruncationPlan& plan, std::size_t n);

class StableBasis {
 public:
  StableBasis(KernelConfig config, std::vector<SpherePoint> nodes, TruncationPlan plan,
              Eigen::MatrixXd trailing, double rcond_r1, double min_column_ratio);

  const KernelConfig& config() const { return config_; }
  const std::vector<SpherePoint>& nodes() const { return nodes_; }
  const std::vector<TangentFrame>& frames() const { return frames_; }
  const TruncationPlan& plan() const { return plan_; }
  const HarmonicEnumeration& enumeration() const { return enumeration_; }

  std::size_t size() const { return 2 * nodes_.size(); }  // 2n basis functions
  std::size_t m() const { return plan_.m; }

  // (R1^{-1} R2) o Etilde, 2n x (m - 2n).
  const Eigen::MatrixXd& trailing() const { return trailing_; }
  // [I | trailing], 2n x m.
  Eigen::MatrixXd combination_matrix() const;

  // min |R_kk| / max |R_kk| over the leading triangle.
  double rcond_r1() const { return rcond_r1_; }
  // min over k of |R_kk| / |column k of B|; the unisolvency measure.
  double min_column_ratio() const { return min_column_ratio_; }

 private:
  KernelConfig config_;
  std::vector<SpherePoint> nodes_;
  std::vector<TangentFrame> frames_;
  TruncationPlan plan_;
  HarmonicEnumeration enumeration_;
  Eigen::MatrixXd trailing_;
  double rcond_r1_;
  double min_column_ratio_;
};

// Node sets whose leading QR columns lose more than this fraction of their
// norm are rejected as not unisolvent.
inline constexpr double kUnisolvencyThreshold = 1e-13;

StableBasis build_stable_basis(const KernelConfig& config, std::vector<SpherePoint> nodes,
                               const TruncationOptions& options = {});

// Bt Y(x): 2n x 2; row k is the (a, b) components of basis function k at x.
Eigen::MatrixXd basis_eval(const StableBasis& basis, const SpherePoint& x);

// Stream functions of the basis at x (2n values): the same combination of
// scalar harmonics.
Eigen::VectorXd basis_stream_eval(const StableBasis& basis, const SpherePoint& x);

class QRInterpolant {
 public:
  QRInterpolant(std::shared_ptr<const StableBasis> basis, Eigen::VectorXd coeffs,
                double residual, double rcond);

  const StableBasis& basis() const { return *basis_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  // Bt^T coeffs: weights of each vector harmonic in the interpolant.
  const Eigen::VectorXd& harmonic_weights() const { return weights_; }
  double residual() const { return residual_; }
  double rcond() const { return rcond_; }

  Vec3 eval(const SpherePoint& x) const;
  double stream(const SpherePoint& x) const;

  // Batched evaluation; same values as the pointwise calls.
  std::vector<Vec3> eval(std::span<const SpherePoint> xs) const;
  std::vector<double> stream(std::span<const SpherePoint> xs) const;

 private:
  std::shared_ptr<const StableBasis> basis_;
  Eigen::VectorXd coeffs_;
  Eigen::VectorXd weights_;
  double residual_;
  double rcond_;
};

// Solves the 2n x 2n collocation system (rows: basis_eval at each node) by
// partially pivoted LU. Samples must sit on the basis nodes in order.
QRInterpolant fit_qr(std::shared_ptr<const StableBasis> basis, const TangentFieldSamples& samples);

inline Vec3 eval_qr(const QRInterpolant& interp, const SpherePoint& x) { return interp.eval(x); }
inline double stream_qr(const QRInterpolant& interp, const SpherePoint& x) {
  return interp.stream(x);
}

}  // namespace divrbf
