#include "divrbf/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "divrbf/error.hpp"

namespace divrbf {

namespace {

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << source << ":" << line << ": " << what;
  throw Error(ErrorCode::Parse, os.str());
}

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

bool is_blank(const std::string& s) {
  return s.find_first_not_of(" \t\r") == std::string::npos;
}

double parse_double(std::string_view tok, const std::string& source, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
    parse_fail(source, line, "bad number '" + std::string(tok) + "'");
  return v;
}

// Reads exactly `count` numbers from a data line.
std::vector<double> parse_fields(const std::string& body, std::size_t count,
                                 const std::string& source, std::size_t line) {
  std::istringstream ls(body);
  std::vector<double> out;
  std::string tok;
  while (ls >> tok) out.push_back(parse_double(tok, source, line));
  if (out.size() != count) {
    std::ostringstream os;
    os << "expected " << count << " numbers, found " << out.size();
    parse_fail(source, line, os.str());
  }
  return out;
}

SpherePoint point_at(double x, double y, double z, const std::string& source, std::size_t line) {
  try {
    return SpherePoint(x, y, z);
  } catch (const Error& e) {
    parse_fail(source, line, e.what());
  }
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  return out;
}

void finish_write(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

std::optional<double> parse_cell(const std::string& tok, const std::string& source,
                                 std::size_t line) {
  if (tok == "NA") return std::nullopt;
  return parse_double(tok, source, line);
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(s);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!s.empty() && s.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<SpherePoint> parse_nodes(std::istream& in, const std::string& source) {
  std::vector<SpherePoint> nodes;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = strip_comment(line);
    if (is_blank(body)) continue;
    const auto v = parse_fields(body, 3, source, lineno);
    nodes.push_back(point_at(v[0], v[1], v[2], source, lineno));
  }
  if (nodes.empty()) throw Error(ErrorCode::Parse, source + ": no nodes");
  return nodes;
}

std::vector<SpherePoint> read_nodes(const std::string& path) {
  auto in = open_in(path);
  return parse_nodes(in, path);
}

void write_nodes(std::ostream& out, const std::vector<SpherePoint>& nodes) {
  for (const auto& p : nodes)
    out << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z())
        << '\n';
}

void write_nodes(const std::string& path, const std::vector<SpherePoint>& nodes) {
  auto out = open_out(path);
  write_nodes(out, nodes);
  finish_write(out, path);
}

TangentFieldSamples parse_samples(std::istream& in, const std::string& source) {
  std::vector<SpherePoint> nodes;
  std::vector<Vec3> vectors;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = strip_comment(line);
    if (is_blank(body)) continue;
    const auto v = parse_fields(body, 6, source, lineno);
    const SpherePoint p = point_at(v[0], v[1], v[2], source, lineno);
    const Vec3 u(v[3], v[4], v[5]);
    if (std::abs(p.vec().dot(u)) > 1e-8 * u.norm())
      parse_fail(source, lineno, "vector is not tangent to the sphere");
    nodes.push_back(p);
    vectors.push_back(u);
  }
  if (nodes.empty()) throw Error(ErrorCode::Parse, source + ": no samples");
  TangentFieldSamples s = TangentFieldSamples::from_vectors(std::move(nodes), vectors);
  s.validate();
  return s;
}

TangentFieldSamples read_samples(const std::string& path) {
  auto in = open_in(path);
  return parse_samples(in, path);
}

void write_samples(const std::string& path, const TangentFieldSamples& samples) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < samples.nodes.size(); ++i) {
    const auto& p = samples.nodes[i];
    const Vec3 u = reconstruct_vector(tangent_frame(p), samples.comps[i]);
    out << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z())
        << ' ' << format_double(u.x()) << ' ' << format_double(u.y()) << ' '
        << format_double(u.z()) << '\n';
  }
  finish_write(out, path);
}

void write_report(std::ostream& out, const SweepReport& r) {
  out << "# kernel=" << r.kernel << '\n'
      << "# n=" << r.n << '\n'
      << "# nodes=" << r.node_source << '\n'
      << "# target=" << r.target << '\n'
      << "# eval_points=" << r.eval_count << '\n'
      << "# tol=" << format_double(r.tol) << '\n'
      << "# mu_max=" << r.mu_max << '\n';
  out << kReportHeader << '\n';
  for (const auto& row : r.rows) {
    out << format_double(row.epsilon) << ',' << cell(row.err_field_direct) << ','
        << cell(row.err_field_qr) << ',' << cell(row.err_stream_direct) << ','
        << cell(row.err_stream_qr) << ',' << cell(row.cond_direct) << ',' << row.status_direct
        << ',' << row.status_qr << '\n';
  }
}

void write_report(const std::string& path, const SweepReport& report) {
  auto out = open_out(path);
  write_report(out, report);
  finish_write(out, path);
}

SweepReport parse_report(std::istream& in, const std::string& source) {
  SweepReport r;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(line.find_first_not_of("# "), eq - line.find_first_not_of("# "));
      const std::string value = line.substr(eq + 1);
      try {
        if (key == "kernel") r.kernel = value;
        else if (key == "n") r.n = std::stoul(value);
        else if (key == "nodes") r.node_source = value;
        else if (key == "target") r.target = value;
        else if (key == "eval_points") r.eval_count = std::stoul(value);
        else if (key == "tol") r.tol = std::stod(value);
        else if (key == "mu_max") r.mu_max = std::stoi(value);
      } catch (const std::logic_error&) {
        parse_fail(source, lineno, "bad metadata value for '" + key + "'");
      }
      continue;
    }
    if (!header_seen) {
      if (line != kReportHeader) parse_fail(source, lineno, "unexpected report header");
      header_seen = true;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 8) parse_fail(source, lineno, "expected 8 columns");
    SweepRow row;
    row.epsilon = parse_double(f[0], source, lineno);
    row.err_field_direct = parse_cell(f[1], source, lineno);
    row.err_field_qr = parse_cell(f[2], source, lineno);
    row.err_stream_direct = parse_cell(f[3], source, lineno);
    row.err_stream_qr = parse_cell(f[4], source, lineno);
    row.cond_direct = parse_cell(f[5], source, lineno);
    row.status_direct = f[6];
    row.status_qr = f[7];
    r.rows.push_back(std::move(row));
  }
  if (!header_seen) throw Error(ErrorCode::Parse, source + ": missing report header");
  return r;
}

SweepReport read_report(const std::string& path) {
  auto in = open_in(path);
  return parse_report(in, path);
}

}  // namespace divrbf
