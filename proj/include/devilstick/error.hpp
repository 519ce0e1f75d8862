#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace devilstick {

enum class ErrorKind {
    NonFinite,
    InvalidArgument,
    Infeasible,
    Degenerate,
    Singular,
    WrongRotationSign,
    OffSchedule,
    NoPositiveRoot,
    RodExceeded,
    AsymmetricSpec,
    WrongSign,
    NotOnSection,
    FDInconsistent,
    RiccatiDiverged,
    NotStabilizing,
    EmptyLog,
    Parse,
    Validation,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::WrongRotationSign: return "WrongRotationSign";
    case ErrorKind::OffSchedule: return "OffSchedule";
    case ErrorKind::NoPositiveRoot: return "NoPositiveRoot";
    case ErrorKind::RodExceeded: return "RodExceeded";
    case ErrorKind::AsymmetricSpec: return "AsymmetricSpec";
    case ErrorKind::WrongSign: return "WrongSign";
    case ErrorKind::NotOnSection: return "NotOnSection";
    case ErrorKind::FDInconsistent: return "FDInconsistent";
    case ErrorKind::RiccatiDiverged: return "RiccatiDiverged";
    case ErrorKind::NotStabilizing: return "NotStabilizing";
    case ErrorKind::EmptyLog: return "EmptyLog";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Validation: return "Validation";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind so
/// callers (the episode harness in particular) can record it as data.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace devilstick
