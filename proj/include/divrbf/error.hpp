#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace divrbf {

enum class ErrorCode {
  InvalidInput,
  Domain,
  NotPositiveDefinite,
  SingularSystem,
  NotUnisolvent,
  TruncationCapExceeded,
  SeriesNonconvergence,
  DegenerateTruth,
  Parse,
  Io,
};

// Short machine-readable name, used as the status code in sweep reports.
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace divrbf
