#pragma once

#include <stdexcept>
#include <string>

namespace dce {

/// Invalid cutoffs, indices, trajectories or config values. CLI exit code 2.
class ConfigurationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input lies outside the regime where a formula is valid (e.g. ½N ≥ 1
/// in the perturbative entropy). CLI exit code 3.
class RegimeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A computed object failed a validity check (negative eigenvalues,
/// covariance below the uncertainty bound, truncation too coarse).
/// CLI exit code 4.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An ODE or propagation did not reach its end point within tolerance.
class IntegrationError : public NumericalError {
public:
    IntegrationError(const std::string& what, double reached)
        : NumericalError(what), reached_(reached) {}

    /// Last time (or τ) the integrator got to before giving up.
    [[nodiscard]] double reached() const noexcept { return reached_; }

private:
    double reached_;
};

/// Cross-validation between backends exceeded a documented tolerance.
/// CLI exit code 5.
class CrosscheckFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Emits a one-line warning on stderr.
void warn(const std::string& message);

}  // namespace dce
