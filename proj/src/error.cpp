#include "mvw/error.hpp"

namespace mvw {

const char* toString(ErrorCode code) {
    switch (code) {
    case ErrorCode::CutLocus: return "CutLocus";
    case ErrorCode::DegenerateGeodesic: return "DegenerateGeodesic";
    case ErrorCode::ConjugatePoint: return "ConjugatePoint";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularL: return "SingularL";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ManifoldMismatch: return "ManifoldMismatch";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
    case ErrorCode::NumericalAbort: return "NumericalAbort";
    }
    return "Unknown";
}

}  // namespace mvw
