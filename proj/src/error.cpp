#include "kpz/error.hpp"

namespace kpz {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidParameter: return "invalid parameter";
    case ErrorCode::InvalidPath: return "invalid path";
    case ErrorCode::InvalidQuery: return "invalid query";
    case ErrorCode::DomainOverflow: return "domain overflow";
    case ErrorCode::DomainShortfall: return "domain shortfall";
    case ErrorCode::OutOfWindow: return "out of window";
    case ErrorCode::FitFailure: return "fit failure";
    case ErrorCode::GridMismatch: return "grid mismatch";
    case ErrorCode::RejectionBudget: return "rejection budget exhausted";
    case ErrorCode::NonDyadicTime: return "non-dyadic time";
    case ErrorCode::WindowTooSmall: return "window too small";
    case ErrorCode::GridResolution: return "grid resolution";
    case ErrorCode::InsufficientSamples: return "insufficient samples";
    case ErrorCode::UnknownTarget: return "unknown target";
    case ErrorCode::Io: return "i/o failure";
    case ErrorCode::Config: return "config error";
    case ErrorCode::CriterionEvaluation: return "criterion evaluation failure";
    }
    return "error";
}

}  // namespace kpz
