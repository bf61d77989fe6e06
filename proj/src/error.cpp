#include "orbitscan/error.hpp"

namespace orbitscan {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonConvergent: return "NonConvergent";
        case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
        case ErrorCode::InsufficientViews: return "InsufficientViews";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::EmptyFrame: return "EmptyFrame";
        case ErrorCode::NoTarget: return "NoTarget";
        case ErrorCode::DegenerateOrbit: return "DegenerateOrbit";
        case ErrorCode::NoFrameAvailable: return "NoFrameAvailable";
        case ErrorCode::EmptyReconstruction: return "EmptyReconstruction";
        case ErrorCode::IllegalTransition: return "IllegalTransition";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

}  // namespace orbitscan
