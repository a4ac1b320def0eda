#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace acdma {

/// Failure categories raised by the library. The command-line tool maps
/// them onto process exit codes.
enum class ErrorCode {
    InvalidArgument,
    NotPositiveDefinite,
    EmptyGrid,
    Divergence,
    Bracket,
    OutOfTabulatedRange,
    UndersampledConfiguration,
    ZeroPower,
    HypothesisViolated,
    NonConvergence,
    UnreachableEbN0,
    PulseTooLong,
    ZeroBandwidth,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace acdma
