#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace syracuse {

enum class ErrorCode {
    EvenParameter,
    NonPositiveSum,
    NonPositiveMultiplier,
    NotACycle,
    BudgetTooSmall,
    NonPositiveB,
    InconclusivePrecision,
    MuTooSmall,
    DegenerateA,
    DegenerateCycle,
    RelationViolation,
    WrongFamily,
    BadNu,
    BadArgument,
    ConfigMismatch,
    Io,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::EvenParameter: return "EvenParameter";
    case ErrorCode::NonPositiveSum: return "NonPositiveSum";
    case ErrorCode::NonPositiveMultiplier: return "NonPositiveMultiplier";
    case ErrorCode::NotACycle: return "NotACycle";
    case ErrorCode::BudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::NonPositiveB: return "NonPositiveB";
    case ErrorCode::InconclusivePrecision: return "InconclusivePrecision";
    case ErrorCode::MuTooSmall: return "MuTooSmall";
    case ErrorCode::DegenerateA: return "DegenerateA";
    case ErrorCode::DegenerateCycle: return "DegenerateCycle";
    case ErrorCode::RelationViolation: return "RelationViolation";
    case ErrorCode::WrongFamily: return "WrongFamily";
    case ErrorCode::BadNu: return "BadNu";
    case ErrorCode::BadArgument: return "BadArgument";
    case ErrorCode::ConfigMismatch: return "ConfigMismatch";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace syracuse
