#pragma once

#include <stdexcept>
#include <string>

namespace hdclt {

// Argument outside the mathematical domain of a function (t <= 0 for the
// Mills envelope, u outside (0,1) for a quantile, ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// A TailSpec, schedule or config violates a named parameter constraint.
struct SpecificationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Root finder or fixed-point iteration failed to bracket or converge.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Monte Carlo estimator cannot produce a meaningful value from its input.
struct EstimationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hdclt
