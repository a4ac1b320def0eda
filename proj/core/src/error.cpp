#include "acdma/error.hpp"

namespace acdma {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::NotPositiveDefinite: return "not positive definite";
    case ErrorCode::EmptyGrid: return "empty grid";
    case ErrorCode::Divergence: return "divergence";
    case ErrorCode::Bracket: return "bracket";
    case ErrorCode::OutOfTabulatedRange: return "out of tabulated range";
    case ErrorCode::UndersampledConfiguration: return "undersampled configuration";
    case ErrorCode::ZeroPower: return "zero power";
    case ErrorCode::HypothesisViolated: return "scalar solver hypotheses violated";
    case ErrorCode::NonConvergence: return "numerical non-convergence";
    case ErrorCode::UnreachableEbN0: return "unreachable Eb/N0";
    case ErrorCode::PulseTooLong: return "pulse too long for N";
    case ErrorCode::ZeroBandwidth: return "zero bandwidth";
    case ErrorCode::Io: return "i/o error";
    }
    return "unknown error";
}

namespace {

std::string compose(ErrorCode code, const std::string& detail)
{
    std::string msg(to_string(code));
    if (!detail.empty()) {
        msg += ": ";
        msg += detail;
    }
    return msg;
}

} // namespace

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(compose(code, detail)), code_(code)
{
}

} // namespace acdma
