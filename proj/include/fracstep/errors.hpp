#pragma once

#include <stdexcept>
#include <string>

namespace fracstep {

enum class ErrorKind {
    Domain,                  // argument outside the mathematical domain
    InvalidMesh,             // non-monotone nodes, bad grading, empty mesh
    NonConvergence,          // series hit its term budget
    ToleranceUnreachable,    // SOE construction ran out of nodes
    SoeNotCertified,         // SOE window or tolerance unsuitable for the mesh
    OutOfWindow,             // SOE evaluated outside [delta_t, T]
    ZeroDiagonal,            // A^(n)_0 <= 0 in the complementary recursion
    NonUniformMesh,          // BDF2 recombination requested on a graded mesh
    StepRestrictionViolated, // Gronwall maximum-step condition fails
    SingularSystem,          // implicit step cannot be solved
    DegenerateKernel,        // A^(n)_0 == A^(n)_1 in the energy lemma
    NonPositiveError,        // order estimation fed a non-positive error
    LengthMismatch,
};

inline const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// True for failures of the numerics rather than of the caller's input.
    bool is_numerical() const noexcept {
        switch (kind_) {
        case ErrorKind::NonConvergence:
        case ErrorKind::ToleranceUnreachable:
        case ErrorKind::ZeroDiagonal:
        case ErrorKind::SingularSystem:
        case ErrorKind::DegenerateKernel:
            return true;
        default:
            return false;
        }
    }

private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Domain: return "Domain";
    case ErrorKind::InvalidMesh: return "InvalidMesh";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::ToleranceUnreachable: return "ToleranceUnreachable";
    case ErrorKind::SoeNotCertified: return "SOENotCertified";
    case ErrorKind::OutOfWindow: return "OutOfWindow";
    case ErrorKind::ZeroDiagonal: return "ZeroDiagonal";
    case ErrorKind::NonUniformMesh: return "NonUniformMesh";
    case ErrorKind::StepRestrictionViolated: return "StepRestrictionViolated";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::DegenerateKernel: return "DegenerateKernel";
    case ErrorKind::NonPositiveError: return "NonPositiveError";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    }
    return "Unknown";
}

} // namespace fracstep
