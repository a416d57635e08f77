#pragma once

#include <stdexcept>
#include <string>

namespace oqp {

// Failure categories surfaced by the library. The CLI maps these to process
// exit codes (see cli.hpp).
enum class ErrorKind {
    DomainError,         // argument outside an operation's domain
    UnsupportedModel,    // operation not defined for this model kind
    Unstable,            // rate at or below the mean arrival rate
    NoCrossing,          // balance equation has no sign change in (lambda, r_max)
    EmptyAdmissibleSet,  // no coding duration satisfies the constraints
    CapTooSmall,         // truncated state space leaks more mass than tolerated
    NonPositiveService,  // service batch r*N*T is not positive
    ScanCapExceeded,     // exponent minimization hit its iteration cap while still decreasing
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::DomainError: return "domain_error";
        case ErrorKind::UnsupportedModel: return "unsupported_model";
        case ErrorKind::Unstable: return "unstable";
        case ErrorKind::NoCrossing: return "no_crossing";
        case ErrorKind::EmptyAdmissibleSet: return "empty_admissible_set";
        case ErrorKind::CapTooSmall: return "cap_too_small";
        case ErrorKind::NonPositiveService: return "non_positive_service";
        case ErrorKind::ScanCapExceeded: return "scan_cap_exceeded";
    }
    return "unknown";
}

}  // namespace oqp
