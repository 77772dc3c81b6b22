#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pexstab {

enum class ErrorKind {
    NonInvertible,
    NonAbelian,
    ClosureOverflow,
    OutOfCarrier,
    Mismatch,
    NotContractive,
    ZeroDenominatorViolation,
    LambdaNotContractive,
    ConstraintViolation,
    NoFiniteStep,
    MaxIterations,
    HypothesisViolated,
    LawViolation,
    CertificateImpossible,
    Config,
};

std::string_view to_string(ErrorKind kind);

/// Process exit code for a failed run: 2 hypothesis, 3 nonconvergence, 4 config.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// Message without the kind prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

}  // namespace pexstab
