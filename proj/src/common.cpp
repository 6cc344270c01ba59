#include "negdro/common.hpp"

namespace negdro {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::CyclicGraph: return "CyclicGraph";
    case ErrorCode::NearSingular: return "NearSingular";
    case ErrorCode::UnknownScenario: return "UnknownScenario";
    case ErrorCode::UpsilonTooLarge: return "UpsilonTooLarge";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::EmptyChildSet: return "EmptyChildSet";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::NoInvariantSubset: return "NoInvariantSubset";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptySelection: return "EmptySelection";
  }
  return "Unknown";
}

}  // namespace negdro
