#pragma once

#include <stdexcept>
#include <string>

namespace strmach {

// Error classes map onto the CLI exit-code contract: definition/structure
// problems are validation errors, runtime problems are evaluation errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct EvaluationError : Error {
    using Error::Error;
};

struct UsageError : Error {
    using Error::Error;
};

// Degree arithmetic left the representable range. Distinct from the other
// evaluation failures so bound checks can never pass silently wrapped.
struct DegreeOverflowError : EvaluationError {
    using EvaluationError::EvaluationError;
};

struct IllTypedError : ValidationError {
    using ValidationError::ValidationError;
};

struct UnknownGeneratorError : ValidationError {
    using ValidationError::ValidationError;
};

}  // namespace strmach
