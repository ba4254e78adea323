// divrbf: command-line driver for div-free RBF interpolation on the sphere.
//
//   divrbf sweep  --kernel mq --eps 0.01:2:12 --hammersley 924 --target paper-gaussians
//   divrbf interp --kernel ga --eps 0.5 --samples data.txt --eval grid:46x90 --out field.csv
//   divrbf nodes  --hammersley 100 --out nodes.txt
//   divrbf verify --kernel imq --eps 1 --nodes nodes.txt --target vsh-lowdegree
//
// Exit codes: 0 success, 1 usage, 2 numerical failure, 3 I/O.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "divrbf/direct.hpp"
#include "divrbf/error.hpp"
#include "divrbf/geom.hpp"
#include "divrbf/harness.hpp"
#include "divrbf/io.hpp"
#include "divrbf/kernels.hpp"
#include "divrbf/rbfqr.hpp"

namespace {

using namespace divrbf;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitIo = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Args {
  std::string kernel = "mq";
  std::string eps;
  std::string nodes_file;
  std::size_t hammersley = 0;
  std::string target;
  std::string samples_file;
  std::string eval = "hammersley4n";
  std::string out;
  double tol = 1e-16;
  int mu_max = 300;
  std::string method = "both";
  bool literal_typo = false;
};

double parse_number(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw UsageError(std::string("bad ") + what + " '" + s + "'");
  }
}

// "a,b,c" or "lo:hi:count".
std::vector<double> parse_eps(const std::string& spec) {
  if (spec.empty()) throw UsageError("--eps is required");
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw UsageError("--eps range must be lo:hi:count");
    const double lo = parse_number(parts[0], "epsilon");
    const double hi = parse_number(parts[1], "epsilon");
    const double count = parse_number(parts[2], "count");
    if (count < 1 || count != static_cast<double>(static_cast<std::size_t>(count)))
      throw UsageError("--eps count must be a positive integer");
    if (!(lo > 0.0) || !(hi >= lo)) throw UsageError("--eps range needs 0 < lo <= hi");
    return geometric_range(lo, hi, static_cast<std::size_t>(count));
  }
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ',');) {
    const double v = parse_number(p, "epsilon");
    if (!(v > 0.0) || !std::isfinite(v)) throw UsageError("epsilon must be positive");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("--eps is empty");
  return out;
}

std::vector<SpherePoint> load_nodes(const Args& a, std::string* source) {
  if (!a.nodes_file.empty() && a.hammersley > 0)
    throw UsageError("--nodes and --hammersley are mutually exclusive");
  if (!a.nodes_file.empty()) {
    *source = a.nodes_file;
    return read_nodes(a.nodes_file);
  }
  if (a.hammersley > 0) {
    *source = "hammersley:" + std::to_string(a.hammersley);
    return hammersley_nodes(a.hammersley);
  }
  throw UsageError("one of --nodes or --hammersley is required");
}

std::vector<SpherePoint> eval_points(const std::string& spec, std::size_t n) {
  if (spec == "hammersley4n") return hammersley_nodes(4 * n);
  if (spec.rfind("grid:", 0) == 0) {
    const std::string dims = spec.substr(5);
    const auto x = dims.find('x');
    if (x == std::string::npos) throw UsageError("--eval grid needs <nlat>x<nlon>");
    const double nlat = parse_number(dims.substr(0, x), "grid size");
    const double nlon = parse_number(dims.substr(x + 1), "grid size");
    if (nlat < 1 || nlon < 1) throw UsageError("grid sizes must be positive");
    return latlon_grid(static_cast<std::size_t>(nlat), static_cast<std::size_t>(nlon));
  }
  throw UsageError("--eval must be hammersley4n or grid:<nlat>x<nlon>");
}

TruncationOptions truncation(const Args& a) {
  if (!(a.tol > 0.0) || a.tol > 1e-8) throw UsageError("--tol must lie in (0, 1e-8]");
  if (a.mu_max < 1) throw UsageError("--mu-max must be positive");
  TruncationOptions t;
  t.tol = a.tol;
  t.mu_max = a.mu_max;
  return t;
}

KernelKind kernel_of(const Args& a) {
  try {
    return parse_kernel_kind(a.kernel);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

Method method_of(const Args& a) {
  try {
    return parse_method(a.method);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

std::optional<TargetField> target_of(const Args& a) {
  if (a.target.empty()) return std::nullopt;
  try {
    return builtin_target(a.target, a.literal_typo);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

// Samples come from --samples, or from the target sampled at the nodes.
TangentFieldSamples load_samples(const Args& a, const std::optional<TargetField>& target,
                                 std::string* source) {
  if (!a.samples_file.empty()) {
    if (!a.nodes_file.empty() || a.hammersley > 0)
      throw UsageError("--samples carries its own nodes; drop --nodes/--hammersley");
    *source = a.samples_file;
    return read_samples(a.samples_file);
  }
  if (!target) throw UsageError("one of --target or --samples is required");
  return sample_target(*target, load_nodes(a, source));
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  return file;
}

void finish_output(const std::string& path, std::ofstream& file) {
  if (!file.is_open()) return;
  file.flush();
  if (!file) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

int cmd_sweep(const Args& a) {
  const KernelKind kind = kernel_of(a);
  const auto eps = parse_eps(a.eps);
  const auto target = target_of(a);
  if (!target) throw UsageError("sweep needs --target; the error columns are measured against it");
  if (!a.samples_file.empty()) throw UsageError("sweep takes --target, not --samples");
  SweepOptions opts;
  opts.truncation = truncation(a);
  opts.method = method_of(a);
  std::string source;
  const auto nodes = load_nodes(a, &source);
  const auto pts = eval_points(a.eval, nodes.size());

  const SweepReport report = run_sweep(kind, eps, nodes, *target, pts, opts, source);
  std::ofstream file;
  write_report(open_output(a.out, file), report);
  finish_output(a.out, file);

  bool any_ok = false;
  for (const auto& row : report.rows) any_ok = any_ok || row.status_direct == "ok" || row.status_qr == "ok";
  return any_ok ? kExitOk : kExitNumerical;
}

int cmd_interp(const Args& a) {
  const KernelKind kind = kernel_of(a);
  const auto eps = parse_eps(a.eps);
  if (eps.size() != 1) throw UsageError("interp takes a single --eps value");
  const Method method = method_of(a);
  const TruncationOptions trunc = truncation(a);
  const auto target = target_of(a);
  std::string source;
  const TangentFieldSamples samples = load_samples(a, target, &source);
  const auto pts = eval_points(a.eval, samples.nodes.size());
  const KernelConfig config(kind, eps.front());

  std::optional<DirectInterpolant> direct;
  std::optional<QRInterpolant> qr;
  int failures = 0, attempts = 0;
  if (method != Method::QR) {
    ++attempts;
    try {
      direct.emplace(fit_direct(config, samples));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidInput) throw;
      std::cerr << "direct: " << error_code_name(e.code()) << ": " << e.what() << '\n';
      ++failures;
    }
  }
  if (method != Method::Direct) {
    ++attempts;
    try {
      auto basis = std::make_shared<const StableBasis>(build_stable_basis(config, samples.nodes, trunc));
      qr.emplace(fit_qr(basis, samples));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidInput) throw;
      std::cerr << "qr: " << error_code_name(e.code()) << ": " << e.what() << '\n';
      ++failures;
    }
  }
  if (failures == attempts) return kExitNumerical;

  std::ofstream file;
  std::ostream& out = open_output(a.out, file);
  out << "x,y,z";
  for (const char* m : {"direct", "qr"}) {
    if ((m[0] == 'd' && !direct) || (m[0] == 'q' && !qr)) continue;
    out << ',' << m << "_ux," << m << "_uy," << m << "_uz," << m << "_psi";
  }
  out << '\n';
  for (const auto& p : pts) {
    out << format_double(p.x()) << ',' << format_double(p.y()) << ',' << format_double(p.z());
    auto emit = [&](const Vec3& u, double psi) {
      out << ',' << format_double(u.x()) << ',' << format_double(u.y()) << ','
          << format_double(u.z()) << ',' << format_double(psi);
    };
    if (direct) emit(direct->eval(p), direct->stream(p));
    if (qr) emit(qr->eval(p), qr->stream(p));
    out << '\n';
  }
  finish_output(a.out, file);
  return kExitOk;
}

int cmd_nodes(const Args& a) {
  std::string source;
  const auto nodes = load_nodes(a, &source);
  std::ofstream file;
  std::ostream& out = open_output(a.out, file);
  out << "# " << source << ", n=" << nodes.size() << '\n';
  write_nodes(out, nodes);
  finish_output(a.out, file);
  return kExitOk;
}

// Fits the requested methods and reports diagnostics as key=value lines.
int cmd_verify(const Args& a) {
  const KernelKind kind = kernel_of(a);
  const auto eps = parse_eps(a.eps);
  const Method method = method_of(a);
  const TruncationOptions trunc = truncation(a);
  const auto target = target_of(a);
  std::string source;
  const TangentFieldSamples samples = load_samples(a, target, &source);

  std::ofstream file;
  std::ostream& out = open_output(a.out, file);
  out << "source=" << source << "\nn=" << samples.nodes.size()
      << "\nmin_separation=" << format_double(min_pairwise_distance(samples.nodes)) << '\n';
  bool all_ok = true;
  for (const double e : eps) {
    const KernelConfig config(kind, e);
    out << "eps=" << format_double(e) << '\n';
    if (method != Method::QR) {
      try {
        const auto d = fit_direct(config, samples);
        out << "  direct.status=ok\n  direct.residual=" << format_double(d.residual())
            << "\n  direct.cond=" << format_double(1.0 / d.rcond()) << '\n';
      } catch (const Error& err) {
        all_ok = false;
        out << "  direct.status=" << error_code_name(err.code()) << '\n';
      }
    }
    if (method != Method::Direct) {
      try {
        auto basis = std::make_shared<const StableBasis>(build_stable_basis(config, samples.nodes, trunc));
        out << "  qr.mu0=" << basis->plan().mu0 << "\n  qr.mu_trunc=" << basis->plan().mu_trunc
            << "\n  qr.min_column_ratio=" << format_double(basis->min_column_ratio()) << '\n';
        const auto q = fit_qr(basis, samples);
        out << "  qr.status=ok\n  qr.residual=" << format_double(q.residual()) << '\n';
      } catch (const Error& err) {
        all_ok = false;
        out << "  qr.status=" << error_code_name(err.code()) << '\n';
      }
    }
  }
  finish_output(a.out, file);
  return all_ok ? kExitOk : kExitNumerical;
}

void add_common(CLI::App* cmd, Args& a, bool fit) {
  cmd->add_option("--nodes", a.nodes_file, "node file: one 'x y z' per line");
  cmd->add_option("--hammersley", a.hammersley, "use n Hammersley nodes");
  cmd->add_option("--out", a.out, "output path (default stdout)");
  if (!fit) return;
  cmd->add_option("--kernel", a.kernel, "mq | imq | iq | ga")
      ->check(CLI::IsMember({"mq", "imq", "iq", "ga"}));
  cmd->add_option("--eps", a.eps, "comma list, or lo:hi:count geometric range")->required();
  cmd->add_option("--target", a.target, "paper-gaussians | vsh-lowdegree")
      ->check(CLI::IsMember({"paper-gaussians", "vsh-lowdegree"}));
  cmd->add_option("--samples", a.samples_file, "sample file: 'x y z ux uy uz' per line");
  cmd->add_option("--eval", a.eval, "hammersley4n | grid:<nlat>x<nlon>");
  cmd->add_option("--tol", a.tol, "truncation tolerance")->capture_default_str();
  cmd->add_option("--mu-max", a.mu_max, "truncation degree cap")->capture_default_str();
  cmd->add_option("--method", a.method, "direct | qr | both")
      ->check(CLI::IsMember({"direct", "qr", "both"}));
  cmd->add_flag("--literal-typo", a.literal_typo,
                "use the verbatim last exponent of the paper-gaussians stream function");
}

int run(int argc, char** argv) {
  CLI::App app{"Divergence-free RBF interpolation on the sphere: direct and RBF-QR"};
  app.require_subcommand(1);
  Args a;
  auto* sweep = app.add_subcommand("sweep", "epsilon sweep comparing direct and QR errors");
  auto* interp = app.add_subcommand("interp", "fit once and evaluate the interpolant");
  auto* nodes = app.add_subcommand("nodes", "write a node file");
  auto* verify = app.add_subcommand("verify", "fit and report residuals and diagnostics");
  add_common(sweep, a, true);
  add_common(interp, a, true);
  add_common(nodes, a, false);
  add_common(verify, a, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sweep) return cmd_sweep(a);
    if (*interp) return cmd_interp(a);
    if (*nodes) return cmd_nodes(a);
    return cmd_verify(a);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << error_code_name(e.code()) << ": " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::Io:
      case ErrorCode::Parse:
        return kExitIo;
      case ErrorCode::InvalidInput:
        return kExitUsage;
      default:
        return kExitNumerical;
    }
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
