#pragma once

#include <stdexcept>
#include <string>

namespace hopf {

// Invalid or out-of-range inputs (non-finite parameters, a <= 0, bad grids).
struct DomainError : std::invalid_argument {
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// A trajectory left the representable range (NaN/Inf state detected).
struct NumericalBlowup : std::runtime_error {
    explicit NumericalBlowup(const std::string& what) : std::runtime_error(what) {}
};

// An adaptive integral failed to reach its tolerance, or two independent
// evaluations of the same quantity disagree beyond tolerance.
struct QuadratureFailure : std::runtime_error {
    explicit QuadratureFailure(const std::string& what) : std::runtime_error(what) {}
};

// Zero finding was started without a sign change across the bracket.
struct BracketError : std::runtime_error {
    explicit BracketError(const std::string& what) : std::runtime_error(what) {}
};

// The sign of an estimate could not be resolved after the sampling budget
// was exhausted.
struct AmbiguityError : std::runtime_error {
    explicit AmbiguityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hopf
