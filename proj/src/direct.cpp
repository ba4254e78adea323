#include "divrbf/direct.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>

#include "divrbf/error.hpp"

namespace divrbf {

namespace {

// Hessian of phi(|x - y|) in x applied to v.
Vec3 hessian_apply(const KernelConfig& config, const Vec3& d, const Vec3& v) {
  const auto [F, G2] = radial_factors(config, d.norm());
  return F * v + G2 * d.dot(v) * d;
}

Eigen::Matrix2d block_with_frames(const KernelConfig& config, const SpherePoint& x,
                                  const TangentFrame& fx, const SpherePoint& y,
                                  const TangentFrame& fy) {
  const Vec3 d = x.vec() - y.vec();
  Eigen::Matrix2d out;
  const Vec3* cols[2] = {&fy.a, &fy.b};
  for (int c = 0; c < 2; ++c) {
    const Vec3 w = x.vec().cross(hessian_apply(config, d, y.vec().cross(*cols[c])));
    out(0, c) = fx.a.dot(w);
    out(1, c) = fx.b.dot(w);
  }
  return out;
}

}  // namespace

void TangentFieldSamples::validate() const {
  if (nodes.size() != comps.size()) {
    std::ostringstream os;
    os << "samples: " << nodes.size() << " nodes but " << comps.size() << " component pairs";
    throw Error(ErrorCode::InvalidInput, os.str());
  }
  if (nodes.empty()) throw Error(ErrorCode::InvalidInput, "samples: no nodes");
  if (min_pairwise_distance(nodes) <= 1e-10)
    throw Error(ErrorCode::InvalidInput, "samples: nodes are not pairwise distinct");
}

TangentFieldSamples TangentFieldSamples::from_vectors(std::vector<SpherePoint> nodes,
                                                      std::span<const Vec3> vectors) {
  if (nodes.size() != vectors.size())
    throw Error(ErrorCode::InvalidInput, "samples: node and vector counts differ");
  TangentFieldSamples s;
  s.comps.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Vec3& u = vectors[i];
    if (std::abs(nodes[i].vec().dot(u)) > 1e-8 * u.norm()) {
      std::ostringstream os;
      os << "samples: vector " << i << " is not tangent to the sphere";
      throw Error(ErrorCode::InvalidInput, os.str());
    }
    s.comps.push_back(tangent_components(tangent_frame(nodes[i]), u));
  }
  s.nodes = std::move(nodes);
  return s;
}

Eigen::VectorXd TangentFieldSamples::rhs() const {
  Eigen::VectorXd r(static_cast<Eigen::Index>(2 * comps.size()));
  for (std::size_t i = 0; i < comps.size(); ++i) {
    r(2 * i) = comps[i].first;
    r(2 * i + 1) = comps[i].second;
  }
  return r;
}

Mat3 div_free_kernel(const KernelConfig& config, const SpherePoint& x, const SpherePoint& y) {
  const Vec3 d = x.vec() - y.vec();
  const auto [F, G2] = radial_factors(config, d.norm());
  const Mat3 hess = F * Mat3::Identity() + G2 * d * d.transpose();
  return cross_matrix(x) * hess * cross_matrix(y);
}

Eigen::Matrix2d kernel_block(const KernelConfig& config, const SpherePoint& x,
                             const SpherePoint& y) {
  return block_with_frames(config, x, tangent_frame(x), y, tangent_frame(y));
}

Eigen::MatrixXd assemble_system(const KernelConfig& config, std::span<const SpherePoint> nodes) {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  std::vector<TangentFrame> frames;
  frames.reserve(nodes.size());
  for (const auto& p : nodes) frames.push_back(tangent_frame(p));
  Eigen::MatrixXd A(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      A.block<2, 2>(2 * i, 2 * j) = block_with_frames(config, nodes[i], frames[i], nodes[j], frames[j]);
  return A;
}

DirectInterpolant::DirectInterpolant(KernelConfig config, std::vector<SpherePoint> nodes,
                                     std::vector<Components> coeffs, double residual,
                                     double rcond)
    : config_(config),
      nodes_(std::move(nodes)),
      coeffs_(std::move(coeffs)),
      residual_(residual),
      rcond_(rcond) {
  if (nodes_.size() != coeffs_.size())
    throw Error(ErrorCode::InvalidInput, "DirectInterpolant: node/coefficient count mismatch");
  frames_.reserve(nodes_.size());
  weights_.reserve(nodes_.size());
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    frames_.push_back(tangent_frame(nodes_[j]));
    weights_.push_back(nodes_[j].vec().cross(reconstruct_vector(frames_[j], coeffs_[j])));
  }
}

Vec3 DirectInterpolant::eval(const SpherePoint& x) const {
  Vec3 acc = Vec3::Zero();
  for (std::size_t j = 0; j < nodes_.size(); ++j)
    acc += hessian_apply(config_, x.vec() - nodes_[j].vec(), weights_[j]);
  return x.vec().cross(acc);
}

double DirectInterpolant::stream(const SpherePoint& x) const {
  double psi = 0.0;
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    const Vec3 d = x.vec() - nodes_[j].vec();
    psi += radial_factors(config_, d.norm()).F * d.dot(weights_[j]);
  }
  return psi;
}

DirectInterpolant fit_direct(const KernelConfig& config, const TangentFieldSamples& samples) {
  samples.validate();
  const Eigen::MatrixXd A = assemble_system(config, samples.nodes);
  const Eigen::VectorXd rhs = samples.rhs();
  const double sign = definiteness_sign(config.kind());

  Eigen::LLT<Eigen::MatrixXd> llt(sign * A);
  if (llt.info() != Eigen::Success) {
    std::ostringstream os;
    os << "direct system is not numerically definite (kernel " << kernel_name(config.kind())
       << ", eps " << config.epsilon() << ")";
    throw Error(ErrorCode::NotPositiveDefinite, os.str());
  }
  const Eigen::VectorXd c = llt.solve(sign * rhs);
  if (!c.allFinite())
    throw Error(ErrorCode::NotPositiveDefinite, "direct solve produced non-finite coefficients");

  const double scale = rhs.cwiseAbs().maxCoeff();
  const double residual = (A * c - rhs).cwiseAbs().maxCoeff() / (scale > 0.0 ? scale : 1.0);

  std::vector<Components> coeffs(samples.nodes.size());
  for (std::size_t j = 0; j < coeffs.size(); ++j) coeffs[j] = {c(2 * j), c(2 * j + 1)};
  return DirectInterpolant(config, samples.nodes, std::move(coeffs), residual, llt.rcond());
}

}  // namespace divrbf
