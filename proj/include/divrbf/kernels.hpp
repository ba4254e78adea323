#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace divrbf {

enum class KernelKind { MQ, IMQ, IQ, GA };

KernelKind parse_kernel_kind(std::string_view name);  // "mq", "imq", "iq", "ga"
std::string_view kernel_name(KernelKind kind);

// Radial kernel and shape parameter. epsilon must be finite and > 0; the
// flat limit is reached by taking epsilon small, never zero.
class KernelConfig {
 public:
  KernelConfig(KernelKind kind, double epsilon);

  KernelKind kind() const { return kind_; }
  double epsilon() const { return epsilon_; }

 private:
  KernelKind kind_;
  double epsilon_;
};

double phi(const KernelConfig& config, double r);

// Hessian of phi(|x - y|) in x is F I + G2 (x - y)(x - y)^T, with
// F = phi'(r)/r and G2 = (phi'' - phi'/r)/r^2. Both are smooth at r = 0.
struct RadialFactors {
  double F;
  double G2;
};

RadialFactors radial_factors(const KernelConfig& config, double r);

// Mercer coefficient c_{mu,eps} of phi(|x - y|) in real spherical harmonics
// (coefficient of eps^{2mu} Y(x) Y(y), order-zero term halved). Underflows
// to zero for very high degree.
double expansion_coeff(const KernelConfig& config, int mu);

// log|c_{mu,eps}| and sign(c_{mu,eps}); the log form stays finite where the
// coefficient itself under- or overflows.
double log_abs_expansion_coeff(const KernelConfig& config, int mu);
int expansion_coeff_sign(KernelKind kind, int mu);

// c_{mu,eps} eps^{2mu}, formed in log space.
double scaled_expansion_coeff(const KernelConfig& config, int mu);

// Sign s with s * c_{mu,eps} > 0 for every mu >= 1. The multiquadric's
// coefficients are negative there, so its divergence-free kernel is negative
// definite.
int definiteness_sign(KernelKind kind);

class CoefficientTable {
 public:
  CoefficientTable(const KernelConfig& config, int mu_max);

  const KernelConfig& config() const { return config_; }
  int mu_max() const { return static_cast<int>(values_.size()) - 1; }
  double value(int mu) const { return values_.at(static_cast<std::size_t>(mu)); }
  double scaled(int mu) const { return scaled_.at(static_cast<std::size_t>(mu)); }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& scaled() const { return scaled_; }

 private:
  KernelConfig config_;
  std::vector<double> values_;
  std::vector<double> scaled_;
};

enum class TruncationRule {
  // Neglected degree measured against the term bound at mu0, the highest
  // degree in the leading block of the stable basis.
  LeadingBlock,
  // Neglected degree measured against the largest term bound kept.
  GlobalMax,
};

struct TruncationOptions {
  double tol = 1e-16;
  int mu_max = 300;
  TruncationRule rule = TruncationRule::LeadingBlock;
};

struct TruncationPlan {
  int mu0 = 0;
  int mu_eps = 0;
  int mu_trunc = 0;
  std::size_t m = 0;  // mu_trunc (mu_trunc + 2)
  std::vector<int> degree_of_column;
};

// Smallest degree mu with mu (mu + 2) >= 2n, i.e. ceil(sqrt(2n+1) - 1).
int leading_degree(std::size_t n);

// log of the term bound |c_mu| eps^{2mu} mu (mu+1) (2mu+1) / (8 pi).
double log_term_bound(const KernelConfig& config, int mu);

TruncationPlan build_truncation_plan(const KernelConfig& config, std::size_t n,
                                     const TruncationOptions& options = {});

}  // namespace divrbf
