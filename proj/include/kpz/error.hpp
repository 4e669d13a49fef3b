#pragma once

#include <stdexcept>
#include <string>

namespace kpz {

enum class ErrorCode {
    InvalidParameter,
    InvalidPath,
    InvalidQuery,
    DomainOverflow,
    DomainShortfall,
    OutOfWindow,
    FitFailure,
    GridMismatch,
    RejectionBudget,
    NonDyadicTime,
    WindowTooSmall,
    GridResolution,
    InsufficientSamples,
    UnknownTarget,
    Io,
    Config,
    CriterionEvaluation,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, ErrorCode code, const std::string& what) {
    if (!ok) fail(code, what);
}

}  // namespace kpz
