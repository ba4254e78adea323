#include "divrbf/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "divrbf/error.hpp"
#include "divrbf/harmonics.hpp"

namespace divrbf {

namespace {

constexpr double kPi = std::numbers::pi;
const double kLog4PiPow32 = std::log(4.0 * std::pow(kPi, 1.5));

constexpr std::size_t kSeriesTermCap = 100000;

// Sum of positive terms t_0 = 1, t_{k+1} = t_k * ratio(k), returned as a
// logarithm. Requires ratio(k) to settle at or below `limit` < 1; stops once
// the geometric tail bound falls under the working precision.
template <typename Ratio>
double log_positive_series(Ratio ratio, double limit, const char* what) {
  constexpr double kRescale = 1e250;
  const double log_rescale = std::log(kRescale);
  double sum = 1.0;
  double term = 1.0;
  double log_scale = 0.0;
  for (std::size_t k = 0; k < kSeriesTermCap; ++k) {
    const double r = ratio(static_cast<double>(k));
    term *= r;
    sum += term;
    if (sum > kRescale) {
      sum /= kRescale;
      term /= kRescale;
      log_scale += log_rescale;
    }
    const double bound = std::max(r, limit);
    if (bound < 1.0 && term * bound / (1.0 - bound) < 1e-17 * sum) return log_scale + std::log(sum);
  }
  std::ostringstream os;
  os << what << ": series did not converge within " << kSeriesTermCap << " terms";
  throw Error(ErrorCode::SeriesNonconvergence, os.str());
}

// 2 / (1 + sqrt(1 + 4 eps^2)), as a logarithm.
double log_mq_ratio(double eps) { return std::log(2.0) - std::log1p(std::sqrt(1.0 + 4.0 * eps * eps)); }

}  // namespace

KernelKind parse_kernel_kind(std::string_view name) {
  if (name == "mq") return KernelKind::MQ;
  if (name == "imq") return KernelKind::IMQ;
  if (name == "iq") return KernelKind::IQ;
  if (name == "ga") return KernelKind::GA;
  throw Error(ErrorCode::InvalidInput, "unknown kernel '" + std::string(name) + "'");
}

std::string_view kernel_name(KernelKind kind) {
  switch (kind) {
    case KernelKind::MQ: return "mq";
    case KernelKind::IMQ: return "imq";
    case KernelKind::IQ: return "iq";
    case KernelKind::GA: return "ga";
  }
  return "?";
}

KernelConfig::KernelConfig(KernelKind kind, double epsilon) : kind_(kind), epsilon_(epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    std::ostringstream os;
    os << "shape parameter must be finite and positive, got " << epsilon;
    throw Error(ErrorCode::InvalidInput, os.str());
  }
}

double phi(const KernelConfig& config, double r) {
  const double u = config.epsilon() * config.epsilon() * r * r;
  switch (config.kind()) {
    case KernelKind::MQ: return std::sqrt(1.0 + u);
    case KernelKind::IMQ: return 1.0 / std::sqrt(1.0 + u);
    case KernelKind::IQ: return 1.0 / (1.0 + u);
    case KernelKind::GA: return std::exp(-u);
  }
  return 0.0;
}

RadialFactors radial_factors(const KernelConfig& config, double r) {
  // phi = f(u) with u = eps^2 r^2 gives F = 2 eps^2 f'(u), G2 = 4 eps^4 f''(u).
  const double e2 = config.epsilon() * config.epsilon();
  const double e4 = e2 * e2;
  const double u = e2 * r * r;
  const double w = 1.0 + u;
  switch (config.kind()) {
    case KernelKind::MQ: {
      const double inv = 1.0 / std::sqrt(w);
      return {e2 * inv, -e4 * inv / w};
    }
    case KernelKind::IMQ: {
      const double inv3 = 1.0 / (w * std::sqrt(w));
      return {-e2 * inv3, 3.0 * e4 * inv3 / w};
    }
    case KernelKind::IQ: {
      const double inv = 1.0 / w;
      return {-2.0 * e2 * inv * inv, 8.0 * e4 * inv * inv * inv};
    }
    case KernelKind::GA: {
      const double g = std::exp(-u);
      return {-2.0 * e2 * g, 4.0 * e4 * g};
    }
  }
  return {0.0, 0.0};
}

int expansion_coeff_sign(KernelKind kind, int mu) {
  // MQ denominator (mu + 3/2)(mu + 1/2)(mu - 1/2) is negative only at mu = 0.
  if (kind == KernelKind::MQ) return mu == 0 ? 1 : -1;
  return 1;
}

int definiteness_sign(KernelKind kind) { return kind == KernelKind::MQ ? -1 : 1; }

double log_abs_expansion_coeff(const KernelConfig& config, int mu) {
  if (mu < 0) throw Error(ErrorCode::InvalidInput, "expansion_coeff: mu must be >= 0");
  const double eps = config.epsilon();
  const double e2 = eps * eps;
  const double dmu = mu;
  switch (config.kind()) {
    case KernelKind::MQ: {
      const double num = 2.0 * kPi * (2.0 * e2 + 1.0 + (dmu + 0.5) * std::sqrt(1.0 + 4.0 * e2));
      const double den = std::abs((dmu + 1.5) * (dmu + 0.5) * (dmu - 0.5));
      return std::log(num) - std::log(den) + (2.0 * dmu + 1.0) * log_mq_ratio(eps);
    }
    case KernelKind::IMQ:
      return std::log(4.0 * kPi) - std::log(dmu + 0.5) + (2.0 * dmu + 1.0) * log_mq_ratio(eps);
    case KernelKind::IQ: {
      // 2F1(a, a; 2a; w) by its defining series, a = mu + 1.
      const double a = dmu + 1.0;
      const double w = 4.0 * e2 / (1.0 + 4.0 * e2);
      const double log_f = log_positive_series(
          [a, w](double k) { return (a + k) * (a + k) / ((2.0 * a + k) * (k + 1.0)) * w; }, w,
          "IQ hypergeometric");
      return kLog4PiPow32 + std::lgamma(dmu + 1.0) - std::lgamma(dmu + 1.5) -
             (dmu + 1.0) * std::log1p(4.0 * e2) + log_f;
    }
    case KernelKind::GA: {
      // eps^{-(2mu+1)} I_{mu+1/2}(2 eps^2) = sum_k eps^{4k} / (k! Gamma(k + mu + 3/2)),
      // so no negative power of eps appears.
      const double e4 = e2 * e2;
      const double log_s = log_positive_series(
          [e4, dmu](double k) { return e4 / ((k + 1.0) * (k + dmu + 1.5)); }, 0.0,
          "GA Bessel");
      return kLog4PiPow32 - 2.0 * e2 - std::lgamma(dmu + 1.5) + log_s;
    }
  }
  return 0.0;
}

double expansion_coeff(const KernelConfig& config, int mu) {
  return expansion_coeff_sign(config.kind(), mu) * std::exp(log_abs_expansion_coeff(config, mu));
}

double scaled_expansion_coeff(const KernelConfig& config, int mu) {
  // The direct product is accurate to a couple of ulps; the log route loses ~|log| ulps.
  const double c = expansion_coeff(config, mu);
  const double e = std::pow(config.epsilon(), 2 * mu);
  if (std::isnormal(c) && std::isnormal(e) && std::isnormal(c * e)) return c * e;
  return expansion_coeff_sign(config.kind(), mu) *
         std::exp(log_abs_expansion_coeff(config, mu) + 2.0 * mu * std::log(config.epsilon()));
}

CoefficientTable::CoefficientTable(const KernelConfig& config, int mu_max) : config_(config) {
  if (mu_max < 0) throw Error(ErrorCode::InvalidInput, "CoefficientTable: mu_max must be >= 0");
  values_.reserve(static_cast<std::size_t>(mu_max) + 1);
  scaled_.reserve(static_cast<std::size_t>(mu_max) + 1);
  for (int mu = 0; mu <= mu_max; ++mu) {
    values_.push_back(expansion_coeff(config, mu));
    scaled_.push_back(scaled_expansion_coeff(config, mu));
  }
}

int leading_degree(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidInput, "leading_degree: n must be positive");
  int mu = 0;
  while (static_cast<std::size_t>(mu) * static_cast<std::size_t>(mu + 2) < 2 * n) ++mu;
  return mu;
}

double log_term_bound(const KernelConfig& config, int mu) {
  if (mu < 1) return -std::numeric_limits<double>::infinity();
  const double dmu = mu;
  return log_abs_expansion_coeff(config, mu) + 2.0 * dmu * std::log(config.epsilon()) +
         std::log(dmu * (dmu + 1.0) * (2.0 * dmu + 1.0) / (8.0 * kPi));
}

TruncationPlan build_truncation_plan(const KernelConfig& config, std::size_t n,
                                     const TruncationOptions& options) {
  if (!(options.tol > 0.0 && options.tol <= 1e-8))
    throw Error(ErrorCode::InvalidInput, "truncation tolerance must lie in (0, 1e-8]");
  TruncationPlan plan;
  plan.mu0 = leading_degree(n);
  if (plan.mu0 > options.mu_max) {
    std::ostringstream os;
    os << "n = " << n << " needs degree " << plan.mu0 << ", above the cap " << options.mu_max;
    throw Error(ErrorCode::TruncationCapExceeded, os.str());
  }

  const double log_tol = std::log(options.tol);
  double log_max = -std::numeric_limits<double>::infinity();
  for (int mu = 1; mu <= plan.mu0; ++mu) log_max = std::max(log_max, log_term_bound(config, mu));
  const double log_ref0 = log_term_bound(config, plan.mu0);

  int found = -1;
  for (int mu = plan.mu0; mu <= options.mu_max; ++mu) {
    const double next = log_term_bound(config, mu + 1);
    const double ref = options.rule == TruncationRule::GlobalMax ? log_max : log_ref0;
    if (next < log_tol + ref) {
      found = mu;
      break;
    }
    log_max = std::max(log_max, next);
  }
  if (found < 0) {
    std::ostringstream os;
    os << "truncation did not reach tol " << options.tol << " by degree " << options.mu_max
       << " (kernel " << kernel_name(config.kind()) << ", eps " << config.epsilon() << ")";
    throw Error(ErrorCode::TruncationCapExceeded, os.str());
  }
  plan.mu_eps = found;
  plan.mu_trunc = std::max(plan.mu0, plan.mu_eps);
  plan.m = vector_harmonic_count(plan.mu_trunc);
  plan.degree_of_column.reserve(plan.m);
  for (int mu = 1; mu <= plan.mu_trunc; ++mu)
    for (int k = 0; k < 2 * mu + 1; ++k) plan.degree_of_column.push_back(mu);
  return plan;
}

}  // namespace divrbf
