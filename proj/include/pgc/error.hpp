#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace pgc {

enum class ErrorCode {
  InvalidCurve,
  InvalidArgument,
  RootFindingFailure,
  OnBoundary,
  EndpointSingularity,
  WrongClassification,
  ShapeMismatch,
  OracleFailure,
  NeedsRecompute,
  Io,
  Parse,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised when polished roots still leave a residual above tolerance. Carries
// the offending polynomial (ascending powers) for replay.
class RootFindingError : public Error {
 public:
  RootFindingError(const std::string& what,
                   std::vector<std::complex<double>> polynomial)
      : Error(ErrorCode::RootFindingFailure, what),
        polynomial_(std::move(polynomial)) {}

  const std::vector<std::complex<double>>& polynomial() const noexcept {
    return polynomial_;
  }

 private:
  std::vector<std::complex<double>> polynomial_;
};

}  // namespace pgc
