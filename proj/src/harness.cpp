#include "divrbf/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <memory>
#include <numeric>

#include "divrbf/error.hpp"
#include "divrbf/harmonics.hpp"
#include "divrbf/rbfqr.hpp"

namespace divrbf {

namespace {

struct GaussianBump {
  double amplitude;
  double width;  // coefficient on the horizontal offsets
  double cx, cy, cz;
};

// Stream function and R^3 gradient of the four-bump field.
struct GaussianStream {
  bool literal_typo = false;

  static constexpr std::array<GaussianBump, 4> kBumps{{
      {2.0, 1.5, 0.9, -0.1, 0.2},
      {3.0, 2.0, -0.7, 0.2, 0.25},
      {-2.5, 1.1, -0.2, 0.8, -0.19},
      {-2.0, 2.2, -0.2, -1.0, -0.21},
  }};

  double value_and_gradient(const Vec3& p, Vec3* grad) const {
    double psi = -3.0 * p.z();
    if (grad) *grad = Vec3(0.0, 0.0, -3.0);
    for (std::size_t k = 0; k < kBumps.size(); ++k) {
      const auto& g = kBumps[k];
      const double dx = p.x() - g.cx, dy = p.y() - g.cy, dz = p.z() - g.cz;
      const bool verbatim = literal_typo && k == 3;
      // Verbatim reading of the last bump: -8 (z + 0.21^2), linear in z.
      const double zpart = verbatim ? 8.0 * (p.z() + 0.21 * 0.21) : 8.0 * dz * dz;
      const double e = g.amplitude * std::exp(-g.width * (dx * dx + dy * dy) - zpart);
      psi += e;
      if (grad) {
        const double dzpart = verbatim ? 8.0 : 16.0 * dz;
        *grad += e * Vec3(-2.0 * g.width * dx, -2.0 * g.width * dy, -dzpart);
      }
    }
    return psi;
  }
};

double max_norm(std::span<const Vec3> v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, x.norm());
  return m;
}

bool all_finite(std::initializer_list<std::optional<double>> values) {
  for (const auto& v : values)
    if (!v || !std::isfinite(*v)) return false;
  return true;
}

}  // namespace

TargetField builtin_target(std::string_view name, bool literal_typo) {
  if (name == "paper-gaussians") {
    const GaussianStream s{literal_typo};
    return {std::string(name),
            [s](const SpherePoint& p) { return s.value_and_gradient(p.vec(), nullptr); },
            [s](const SpherePoint& p) {
              Vec3 grad;
              s.value_and_gradient(p.vec(), &grad);
              return Vec3(p.vec().cross(grad));
            }};
  }
  if (name == "vsh-lowdegree") {
    return {std::string(name),
            [](const SpherePoint& p) {
              return scalar_Y({1, 0}, p) + 0.5 * scalar_Y({2, 1}, p);
            },
            [](const SpherePoint& p) {
              return Vec3(vsh_vector({1, 0}, p) + 0.5 * vsh_vector({2, 1}, p));
            }};
  }
  throw Error(ErrorCode::InvalidInput, "unknown target '" + std::string(name) + "'");
}

TangentFieldSamples sample_target(const TargetField& target, std::vector<SpherePoint> nodes) {
  std::vector<Vec3> u;
  u.reserve(nodes.size());
  for (const auto& p : nodes) u.push_back(target.field(p));
  return TangentFieldSamples::from_vectors(std::move(nodes), u);
}

double relative_max_error(std::span<const Vec3> approx, std::span<const Vec3> truth) {
  if (approx.size() != truth.size() || truth.empty())
    throw Error(ErrorCode::InvalidInput, "relative_max_error: need equal, nonempty inputs");
  const double denom = max_norm(truth);
  if (!(denom >= 1e-300)) throw Error(ErrorCode::DegenerateTruth, "relative_max_error: truth is zero");
  double num = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const double d = (approx[k] - truth[k]).norm();
    num = std::isnan(d) ? d : std::max(num, d);
    if (std::isnan(num)) break;
  }
  return num / denom;
}

double relative_max_error(const std::function<Vec3(const SpherePoint&)>& approx,
                          const std::function<Vec3(const SpherePoint&)>& truth,
                          std::span<const SpherePoint> eval_pts) {
  std::vector<Vec3> a, t;
  a.reserve(eval_pts.size());
  t.reserve(eval_pts.size());
  for (const auto& p : eval_pts) {
    a.push_back(approx(p));
    t.push_back(truth(p));
  }
  return relative_max_error(a, t);
}

double stream_error(std::span<const double> approx, std::span<const double> truth) {
  if (approx.size() != truth.size() || truth.empty())
    throw Error(ErrorCode::InvalidInput, "stream_error: need equal, nonempty inputs");
  const double n = static_cast<double>(truth.size());
  const double mean_truth = std::accumulate(truth.begin(), truth.end(), 0.0) / n;
  const double mean_approx = std::accumulate(approx.begin(), approx.end(), 0.0) / n;
  const double shift = mean_truth - mean_approx;
  double num = 0.0, denom = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const double d = std::abs(approx[k] + shift - truth[k]);
    num = std::isnan(d) || std::isnan(num) ? std::numeric_limits<double>::quiet_NaN() : std::max(num, d);
    denom = std::max(denom, std::abs(truth[k] - mean_truth));
  }
  if (!(denom >= 1e-300)) throw Error(ErrorCode::DegenerateTruth, "stream_error: truth is constant");
  return num / denom;
}

double stream_error(const std::function<double(const SpherePoint&)>& approx,
                    const std::function<double(const SpherePoint&)>& truth,
                    std::span<const SpherePoint> eval_pts) {
  std::vector<double> a, t;
  a.reserve(eval_pts.size());
  t.reserve(eval_pts.size());
  for (const auto& p : eval_pts) {
    a.push_back(approx(p));
    t.push_back(truth(p));
  }
  return stream_error(a, t);
}

Method parse_method(std::string_view name) {
  if (name == "direct") return Method::Direct;
  if (name == "qr") return Method::QR;
  if (name == "both") return Method::Both;
  throw Error(ErrorCode::InvalidInput, "unknown method '" + std::string(name) + "'");
}

std::vector<double> geometric_range(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count == 0)
    throw Error(ErrorCode::InvalidInput, "geometric_range: need 0 < lo <= hi and count >= 1");
  std::vector<double> out;
  out.reserve(count);
  if (count == 1) return {hi};
  const double step = std::log(lo / hi) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k)
    out.push_back(k + 1 == count ? lo : hi * std::exp(step * static_cast<double>(k)));
  return out;
}

SweepReport run_sweep(KernelKind kernel, std::vector<double> epsilons,
                      const std::vector<SpherePoint>& nodes, const TargetField& target,
                      const std::vector<SpherePoint>& eval_pts, const SweepOptions& options,
                      std::string node_source) {
  if (eval_pts.empty()) throw Error(ErrorCode::InvalidInput, "run_sweep: no evaluation points");
  std::sort(epsilons.begin(), epsilons.end(), std::greater<>());

  SweepReport report;
  report.kernel = std::string(kernel_name(kernel));
  report.n = nodes.size();
  report.node_source = std::move(node_source);
  report.target = target.name;
  report.eval_count = eval_pts.size();
  report.tol = options.truncation.tol;
  report.mu_max = options.truncation.mu_max;

  const TangentFieldSamples samples = sample_target(target, nodes);
  std::vector<Vec3> truth_field;
  std::vector<double> truth_stream;
  truth_field.reserve(eval_pts.size());
  truth_stream.reserve(eval_pts.size());
  for (const auto& p : eval_pts) {
    truth_field.push_back(target.field(p));
    truth_stream.push_back(target.stream(p));
  }

  for (const double eps : epsilons) {
    SweepRow row;
    row.epsilon = eps;
    const KernelConfig config(kernel, eps);

    if (options.method != Method::QR) {
      try {
        const DirectInterpolant interp = fit_direct(config, samples);
        std::vector<Vec3> f;
        std::vector<double> s;
        f.reserve(eval_pts.size());
        s.reserve(eval_pts.size());
        for (const auto& p : eval_pts) {
          f.push_back(interp.eval(p));
          s.push_back(interp.stream(p));
        }
        row.err_field_direct = relative_max_error(f, truth_field);
        row.err_stream_direct = stream_error(s, truth_stream);
        row.cond_direct = 1.0 / interp.rcond();
        row.residual_direct = interp.residual();
        row.status_direct = all_finite({row.err_field_direct, row.err_stream_direct}) ? "ok" : "nonfinite";
        if (row.status_direct != "ok") row.err_field_direct = row.err_stream_direct = std::nullopt;
      } catch (const Error& e) {
        row.status_direct = std::string(error_code_name(e.code()));
      }
    }

    if (options.method != Method::Direct) {
      try {
        auto basis = std::make_shared<const StableBasis>(
            build_stable_basis(config, nodes, options.truncation));
        row.mu_trunc = basis->plan().mu_trunc;
        const QRInterpolant interp = fit_qr(basis, samples);
        basis.reset();
        row.err_field_qr = relative_max_error(interp.eval(eval_pts), truth_field);
        row.err_stream_qr = stream_error(interp.stream(eval_pts), truth_stream);
        row.residual_qr = interp.residual();
        row.status_qr = all_finite({row.err_field_qr, row.err_stream_qr}) ? "ok" : "nonfinite";
        if (row.status_qr != "ok") row.err_field_qr = row.err_stream_qr = std::nullopt;
      } catch (const Error& e) {
        row.status_qr = std::string(error_code_name(e.code()));
      }
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace divrbf
