// errors.hpp — Exception types shared by all pcqed modules

#pragma once

#include <stdexcept>
#include <string>

namespace pcqed {

// Invalid numeric argument outside the mathematical domain (negative frequency etc.).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// A quadrature, solver or eigensolver did not reach its tolerance.
struct NumericalError : std::runtime_error {
    NumericalError(const std::string& what, double residual_ = 0.0)
        : std::runtime_error(what), residual(residual_) {}
    double residual;
};

// A tabulated kernel had not decayed at the end of its grid.
struct TruncationError : NumericalError {
    using NumericalError::NumericalError;
};

// Fewer than two resolvable spectral peaks, or peaks inconsistent with a doublet.
struct DegeneratePeaksError : NumericalError {
    using NumericalError::NumericalError;
};

// Grids, dimensions or options that violate documented invariants.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Parameter regime outside what a method supports (e.g. detuned polariton-polaron).
struct UnsupportedConfiguration : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A master-equation description is internally inconsistent (missing channel pair).
struct SpecError : std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace pcqed
