#include "divrbf/rbfqr.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/QR>

#include "divrbf/error.hpp"

namespace divrbf {

namespace {

// x * eps^e without forming an out-of-range power on its own.
double scale_by_power(double x, int e, double log_eps) {
  if (e == 0 || x == 0.0) return x;
  const double f = std::exp(e * log_eps);
  if (f > 0.0 && std::isfinite(f)) return x * f;
  return std::copysign(std::exp(std::log(std::abs(x)) + e * log_eps), x);
}

void check_nodes_match(const StableBasis& basis, const TangentFieldSamples& samples) {
  const auto& nodes = basis.nodes();
  if (samples.nodes.size() != nodes.size())
    throw Error(ErrorCode::InvalidInput, "fit_qr: sample count differs from basis node count");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if ((samples.nodes[i].vec() - nodes[i].vec()).norm() > 1e-12) {
      std::ostringstream os;
      os << "fit_qr: sample node " << i << " does not match basis node " << i;
      throw Error(ErrorCode::InvalidInput, os.str());
    }
  }
}

}  // namespace

Eigen::MatrixXd assemble_B(const KernelConfig& config, std::span<const SpherePoint> nodes,
                           const TruncationPlan& plan) {
  if (plan.m != vector_harmonic_count(plan.mu_trunc) || plan.m < 2 * nodes.size())
    throw Error(ErrorCode::InvalidInput, "assemble_B: truncation plan does not fit these nodes");
  const HarmonicEnumeration enumeration(1, plan.mu_trunc);
  Eigen::MatrixXd B = y_matrix(enumeration, nodes).transpose();
  for (int mu = 1; mu <= plan.mu_trunc; ++mu) {
    const double c = expansion_coeff(config, mu);
    const auto first = static_cast<Eigen::Index>(enumeration.position(mu, -mu));
    B.middleCols(first, 2 * mu + 1) *= c;
    B.col(static_cast<Eigen::Index>(enumeration.position(mu, 0))) *= 0.5;
  }
  return B;
}

Eigen::MatrixXi epsilon_exponents(const TruncationPlan& plan, std::size_t n) {
  const std::size_t lead = 2 * n;
  if (plan.m < lead || plan.degree_of_column.size() != plan.m)
    throw Error(ErrorCode::InvalidInput, "epsilon_exponents: plan has fewer than 2n columns");
  Eigen::MatrixXi e(static_cast<Eigen::Index>(lead), static_cast<Eigen::Index>(plan.m - lead));
  for (std::size_t i = 0; i < lead; ++i)
    for (std::size_t j = 0; j < plan.m - lead; ++j)
      e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          2 * (plan.degree_of_column[lead + j] - plan.degree_of_column[i]);
  return e;
}

StableBasis::StableBasis(KernelConfig config, std::vector<SpherePoint> nodes, TruncationPlan plan,
                         Eigen::MatrixXd trailing, double rcond_r1, double min_column_ratio)
    : config_(config),
      nodes_(std::move(nodes)),
      plan_(std::move(plan)),
      enumeration_(1, plan_.mu_trunc),
      trailing_(std::move(trailing)),
      rcond_r1_(rcond_r1),
      min_column_ratio_(min_column_ratio) {
  frames_.reserve(nodes_.size());
  for (const auto& p : nodes_) frames_.push_back(tangent_frame(p));
  if (trailing_.rows() != static_cast<Eigen::Index>(size()) ||
      trailing_.cols() != static_cast<Eigen::Index>(plan_.m - size()))
    throw Error(ErrorCode::InvalidInput, "StableBasis: trailing block has the wrong shape");
}

Eigen::MatrixXd StableBasis::combination_matrix() const {
  const auto lead = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd bt(lead, static_cast<Eigen::Index>(m()));
  bt.leftCols(lead).setIdentity();
  bt.rightCols(trailing_.cols()) = trailing_;
  return bt;
}

StableBasis build_stable_basis(const KernelConfig& config, std::vector<SpherePoint> nodes,
                               const TruncationOptions& options) {
  if (nodes.empty()) throw Error(ErrorCode::InvalidInput, "build_stable_basis: no nodes");
  if (min_pairwise_distance(nodes) <= 1e-10)
    throw Error(ErrorCode::InvalidInput, "build_stable_basis: nodes are not pairwise distinct");

  TruncationPlan plan = build_truncation_plan(config, nodes.size(), options);
  const auto lead = static_cast<Eigen::Index>(2 * nodes.size());
  const auto m = static_cast<Eigen::Index>(plan.m);

  Eigen::MatrixXd B = assemble_B(config, nodes, plan);
  const Eigen::VectorXd lead_norms = B.leftCols(lead).colwise().norm().transpose();

  // In place: B is overwritten by the factorization.
  Eigen::HouseholderQR<Eigen::Ref<Eigen::MatrixXd>> qr(B);
  const auto& packed = qr.matrixQR();

  const Eigen::VectorXd diag = packed.diagonal().head(lead).cwiseAbs();
  double min_ratio = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < lead; ++k)
    min_ratio = std::min(min_ratio, lead_norms(k) > 0.0 ? diag(k) / lead_norms(k) : 0.0);
  if (!(min_ratio >= kUnisolvencyThreshold)) {
    std::ostringstream os;
    os << "node set is not unisolvent for degree-" << plan.mu0
       << " vector harmonics (column ratio " << min_ratio << ")";
    throw Error(ErrorCode::NotUnisolvent, os.str());
  }
  const double rcond_r1 = diag.minCoeff() / diag.maxCoeff();

  Eigen::MatrixXd trailing = packed.topRightCorner(lead, m - lead);
  packed.topLeftCorner(lead, lead).triangularView<Eigen::Upper>().solveInPlace(trailing);

  const double log_eps = std::log(config.epsilon());
  const std::vector<int>& deg = plan.degree_of_column;
  for (Eigen::Index j = 0; j < trailing.cols(); ++j) {
    const int col_deg = deg[static_cast<std::size_t>(lead + j)];
    for (Eigen::Index i = 0; i < lead; ++i)
      trailing(i, j) =
          scale_by_power(trailing(i, j), 2 * (col_deg - deg[static_cast<std::size_t>(i)]), log_eps);
  }
  if (!trailing.allFinite())
    throw Error(ErrorCode::SingularSystem, "build_stable_basis: non-finite basis entries");

  return StableBasis(config, std::move(nodes), std::move(plan), std::move(trailing), rcond_r1,
                     min_ratio);
}

Eigen::MatrixXd basis_eval(const StableBasis& basis, const SpherePoint& x) {
  const auto lead = static_cast<Eigen::Index>(basis.size());
  const Eigen::MatrixXd Y = y_matrix(basis.enumeration(), std::span(&x, 1));
  return Y.topRows(lead) + basis.trailing() * Y.bottomRows(Y.rows() - lead);
}

Eigen::VectorXd basis_stream_eval(const StableBasis& basis, const SpherePoint& x) {
  const auto lead = static_cast<Eigen::Index>(basis.size());
  const Eigen::VectorXd y = scalar_y_matrix(basis.enumeration(), std::span(&x, 1)).col(0);
  return y.head(lead) + basis.trailing() * y.tail(y.size() - lead);
}

QRInterpolant::QRInterpolant(std::shared_ptr<const StableBasis> basis, Eigen::VectorXd coeffs,
                             double residual, double rcond)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)), residual_(residual), rcond_(rcond) {
  const auto lead = static_cast<Eigen::Index>(basis_->size());
  if (coeffs_.size() != lead)
    throw Error(ErrorCode::InvalidInput, "QRInterpolant: coefficient count must be 2n");
  weights_.resize(static_cast<Eigen::Index>(basis_->m()));
  weights_.head(lead) = coeffs_;
  weights_.tail(weights_.size() - lead) = basis_->trailing().transpose() * coeffs_;
}

Vec3 QRInterpolant::eval(const SpherePoint& x) const {
  const std::size_t m = basis_->m();
  std::vector<double> g(m), h(m);
  evaluate_harmonics(basis_->plan().mu_trunc, x, g, h);
  const Eigen::Map<const Eigen::VectorXd> G(g.data(), static_cast<Eigen::Index>(m));
  const Eigen::Map<const Eigen::VectorXd> H(h.data(), static_cast<Eigen::Index>(m));
  return reconstruct_vector(tangent_frame(x), {weights_.dot(G), weights_.dot(H)});
}

double QRInterpolant::stream(const SpherePoint& x) const {
  const std::size_t m = basis_->m();
  std::vector<double> g(m), h(m), y(m);
  evaluate_harmonics(basis_->plan().mu_trunc, x, g, h, y);
  return weights_.dot(Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(m)));
}

std::vector<Vec3> QRInterpolant::eval(std::span<const SpherePoint> xs) const {
  std::vector<Vec3> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(eval(x));
  return out;
}

std::vector<double> QRInterpolant::stream(std::span<const SpherePoint> xs) const {
  std::vector<double> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(stream(x));
  return out;
}

QRInterpolant fit_qr(std::shared_ptr<const StableBasis> basis, const TangentFieldSamples& samples) {
  if (!basis) throw Error(ErrorCode::InvalidInput, "fit_qr: null basis");
  check_nodes_match(*basis, samples);
  if (samples.comps.size() != samples.nodes.size())
    throw Error(ErrorCode::InvalidInput, "fit_qr: node/component count mismatch");

  const auto lead = static_cast<Eigen::Index>(basis->size());
  const Eigen::MatrixXd Y = y_matrix(basis->enumeration(), basis->nodes());
  // Row 2i + c of M is component c of every basis function at node i.
  const Eigen::MatrixXd M =
      (Y.topRows(lead) + basis->trailing() * Y.bottomRows(Y.rows() - lead)).transpose();

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-16)) {
    std::ostringstream os;
    os << "fit_qr: collocation matrix is singular (rcond " << rcond << ")";
    throw Error(ErrorCode::SingularSystem, os.str());
  }
  const Eigen::VectorXd rhs = samples.rhs();
  Eigen::VectorXd c = lu.solve(rhs);
  if (!c.allFinite()) throw Error(ErrorCode::SingularSystem, "fit_qr: non-finite coefficients");
  const double scale = rhs.cwiseAbs().maxCoeff();
  const double residual = (M * c - rhs).cwiseAbs().maxCoeff() / (scale > 0.0 ? scale : 1.0);
  return QRInterpolant(std::move(basis), std::move(c), residual, rcond);
}

}  // namespace divrbf
