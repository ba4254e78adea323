#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "divrbf/direct.hpp"
#include "divrbf/geom.hpp"
#include "divrbf/kernels.hpp"

namespace divrbf {

// A divergence-free test field u = L psi with its stream function.
struct TargetField {
  std::string name;
  std::function<double(const SpherePoint&)> stream;
  std::function<Vec3(const SpherePoint&)> field;
};

// "paper-gaussians": solid-body rotation plus four Gaussian bumps.
//   The last bump's z-exponent is read as -8 (z + 0.21)^2; literal_typo
//   switches to the verbatim -8 (z + 0.21^2).
// "vsh-lowdegree": w_1^0 + 0.5 w_2^1, stream Y_1^0 + 0.5 Y_2^1.
TargetField builtin_target(std::string_view name, bool literal_typo = false);

TangentFieldSamples sample_target(const TargetField& target, std::vector<SpherePoint> nodes);

// max_k |approx_k - truth_k| / max_k |truth_k|.
double relative_max_error(std::span<const Vec3> approx, std::span<const Vec3> truth);
double relative_max_error(const std::function<Vec3(const SpherePoint&)>& approx,
                          const std::function<Vec3(const SpherePoint&)>& truth,
                          std::span<const SpherePoint> eval_pts);

// Shifts approx to the mean of truth, then
//   max |shifted - truth| / max |truth - mean(truth)|.
double stream_error(std::span<const double> approx, std::span<const double> truth);
double stream_error(const std::function<double(const SpherePoint&)>& approx,
                    const std::function<double(const SpherePoint&)>& truth,
                    std::span<const SpherePoint> eval_pts);

enum class Method { Direct, QR, Both };
Method parse_method(std::string_view name);

struct SweepOptions {
  TruncationOptions truncation;
  Method method = Method::Both;
};

struct SweepRow {
  double epsilon = 0.0;
  std::optional<double> err_field_direct;
  std::optional<double> err_field_qr;
  std::optional<double> err_stream_direct;
  std::optional<double> err_stream_qr;
  std::optional<double> cond_direct;
  std::optional<double> residual_direct;
  std::optional<double> residual_qr;
  std::optional<int> mu_trunc;
  std::string status_direct = "skipped";
  std::string status_qr = "skipped";
};

struct SweepReport {
  std::string kernel;
  std::size_t n = 0;
  std::string node_source;
  std::string target;
  std::size_t eval_count = 0;
  double tol = 0.0;
  int mu_max = 0;
  std::vector<SweepRow> rows;  // descending epsilon
};

// Fits both methods at each epsilon and scores them against the target at
// eval_pts. Per-row failures become statuses; nothing is thrown for them.
SweepReport run_sweep(KernelKind kernel, std::vector<double> epsilons,
                      const std::vector<SpherePoint>& nodes, const TargetField& target,
                      const std::vector<SpherePoint>& eval_pts, const SweepOptions& options = {},
                      std::string node_source = "custom");

// count values from hi down to lo, evenly spaced in log.
std::vector<double> geometric_range(double lo, double hi, std::size_t count);

}  // namespace divrbf
