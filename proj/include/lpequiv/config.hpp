#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lpequiv {

enum class ErrorKind {
    Parse,
    InvalidInput,
    DimensionMismatch,
    InconsistentSystem,
    ZeroRhs,
    NotUnderdetermined,
    NumericalRankFailure,
    BlowupLimit,
    Unbounded,
    SignRecoveryFailure,
    CorankMismatch,
    NoNonzeroCoordinate,
};

inline const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InconsistentSystem: return "InconsistentSystem";
    case ErrorKind::ZeroRhs: return "ZeroRhs";
    case ErrorKind::NotUnderdetermined: return "NotUnderdetermined";
    case ErrorKind::NumericalRankFailure: return "NumericalRankFailure";
    case ErrorKind::BlowupLimit: return "BlowupLimit";
    case ErrorKind::Unbounded: return "Unbounded";
    case ErrorKind::SignRecoveryFailure: return "SignRecoveryFailure";
    case ErrorKind::CorankMismatch: return "CorankMismatch";
    case ErrorKind::NoNonzeroCoordinate: return "NoNonzeroCoordinate";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so the
/// CLI can map it onto a stable exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Relative tolerances. The absolute thresholds are derived per use site from
/// the scale of the quantity involved, e.g. feas(b_inf) = feas_rel * (1 + b_inf).
struct Tolerances {
    double feas_rel = 1e-9;
    double rank = 1e-10;
    double orth = 1e-10;
    double zero_rel = 1e-8;
    double dedup_rel = 1e-8;
    double tie_rel = 1e-10;

    double feas(double scale) const { return feas_rel * (1.0 + scale); }
    double zero(double scale) const { return zero_rel * (1.0 + scale); }
    double dedup(double scale) const { return dedup_rel * (1.0 + scale); }
};

/// Size limits beyond which exact projection/enumeration is refused.
struct Caps {
    std::size_t n_max = 10;
    std::size_t d_max = 4;
    std::size_t fm_row_cap = 20000;
    std::size_t subset_cap = 50'000'000;
};

struct Options {
    Tolerances tol{};
    Caps caps{};
};

} // namespace lpequiv
