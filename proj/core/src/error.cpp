#include "msstab/error.hpp"

namespace msstab {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::CurveEscapesStrip: return "CurveEscapesStrip";
        case ErrorCode::SolverDiverged: return "SolverDiverged";
        case ErrorCode::InvalidRestriction: return "InvalidRestriction";
        case ErrorCode::GramSingular: return "GramSingular";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::DegeneratePencil: return "DegeneratePencil";
        case ErrorCode::OddMode: return "OddMode";
        case ErrorCode::InsufficientSamples: return "InsufficientSamples";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace msstab
