#include "pexstab/error.hpp"

namespace pexstab {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NonInvertible: return "NonInvertible";
        case ErrorKind::NonAbelian: return "NonAbelian";
        case ErrorKind::ClosureOverflow: return "ClosureOverflow";
        case ErrorKind::OutOfCarrier: return "OutOfCarrier";
        case ErrorKind::Mismatch: return "Mismatch";
        case ErrorKind::NotContractive: return "NotContractive";
        case ErrorKind::ZeroDenominatorViolation: return "ZeroDenominatorViolation";
        case ErrorKind::LambdaNotContractive: return "LambdaNotContractive";
        case ErrorKind::ConstraintViolation: return "ConstraintViolation";
        case ErrorKind::NoFiniteStep: return "NoFiniteStep";
        case ErrorKind::MaxIterations: return "MaxIterations";
        case ErrorKind::HypothesisViolated: return "HypothesisViolated";
        case ErrorKind::LawViolation: return "LawViolation";
        case ErrorKind::CertificateImpossible: return "CertificateImpossible";
        case ErrorKind::Config: return "Config";
    }
    return "Unknown";
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::HypothesisViolated:
        case ErrorKind::CertificateImpossible:
            return 2;
        case ErrorKind::NotContractive:
        case ErrorKind::ZeroDenominatorViolation:
        case ErrorKind::LambdaNotContractive:
        case ErrorKind::NoFiniteStep:
        case ErrorKind::MaxIterations:
            return 3;
        default:
            return 4;
    }
}

}  // namespace pexstab
