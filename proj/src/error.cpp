#include "pgc/error.hpp"

namespace pgc {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidCurve: return "invalid-curve";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::RootFindingFailure: return "root-finding-failure";
    case ErrorCode::OnBoundary: return "on-boundary";
    case ErrorCode::EndpointSingularity: return "endpoint-singularity";
    case ErrorCode::WrongClassification: return "wrong-classification";
    case ErrorCode::ShapeMismatch: return "shape-mismatch";
    case ErrorCode::OracleFailure: return "oracle-failure";
    case ErrorCode::NeedsRecompute: return "needs-recompute";
    case ErrorCode::Io: return "io";
    case ErrorCode::Parse: return "parse";
  }
  return "unknown";
}

}  // namespace pgc
