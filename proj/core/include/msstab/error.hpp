#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace msstab {

enum class ErrorCode {
    InvalidArgument,
    CurveEscapesStrip,
    SolverDiverged,
    InvalidRestriction,
    GramSingular,
    NoConvergence,
    DegeneratePencil,
    OddMode,
    InsufficientSamples,
    ConfigInvalid,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code is
/// stable and is what callers (and the CLI exit logic) should branch on.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) fail(code, message);
}

}  // namespace msstab
