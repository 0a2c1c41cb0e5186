#include "smc/error.hpp"

namespace smc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::EmptyRoi: return "EmptyRoi";
    case ErrorCode::EmptyGlcm: return "EmptyGlcm";
    case ErrorCode::DegenerateClass: return "DegenerateClass";
    case ErrorCode::TooFewSubclusters: return "TooFewSubclusters";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace smc
