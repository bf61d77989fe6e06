#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace orbitscan {

enum class ErrorCode {
    NonConvergent,
    DegenerateGeometry,
    InsufficientViews,
    InvalidSpec,
    EmptyFrame,
    NoTarget,
    DegenerateOrbit,
    NoFrameAvailable,
    EmptyReconstruction,
    IllegalTransition,
    IoFailure,
    ParseError,
};

std::string_view to_string(ErrorCode code);

// Every recoverable failure in the library is reported through this type so
// callers (the mission loop in particular) can branch on the code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace orbitscan
