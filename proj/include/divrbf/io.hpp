#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "divrbf/direct.hpp"
#include "divrbf/geom.hpp"
#include "divrbf/harness.hpp"

namespace divrbf {

// Node file: one "x y z" per line, whitespace separated, '#' starts a comment.
std::vector<SpherePoint> read_nodes(const std::string& path);
std::vector<SpherePoint> parse_nodes(std::istream& in, const std::string& source = "<stream>");
void write_nodes(const std::string& path, const std::vector<SpherePoint>& nodes);
void write_nodes(std::ostream& out, const std::vector<SpherePoint>& nodes);

// Sample file: "x y z ux uy uz" per line; vectors must be tangent.
TangentFieldSamples read_samples(const std::string& path);
TangentFieldSamples parse_samples(std::istream& in, const std::string& source = "<stream>");
void write_samples(const std::string& path, const TangentFieldSamples& samples);

inline constexpr const char* kReportHeader =
    "epsilon,err_field_direct,err_field_qr,err_stream_direct,err_stream_qr,cond_direct,"
    "status_direct,status_qr";

// Metadata goes first as "# key=value" lines, then the CSV header and rows.
// Missing values are written as NA.
void write_report(const std::string& path, const SweepReport& report);
void write_report(std::ostream& out, const SweepReport& report);
SweepReport read_report(const std::string& path);
SweepReport parse_report(std::istream& in, const std::string& source = "<stream>");

// %.17g
std::string format_double(double x);

}  // namespace divrbf
