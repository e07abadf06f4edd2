#pragma once

#include <stdexcept>
#include <string>

namespace infotrans {

// Base of everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad inputs: wrong shapes, violated preconditions, unparsable files.
// The CLI maps these to exit code 1.
struct ValidationError : Error {
    using Error::Error;
};

// The computation itself failed: blow-up fuses, diverged iterations.
// The CLI maps these to exit code 2.
struct NumericalError : Error {
    using Error::Error;
};

struct WrongDimension : ValidationError {
    using ValidationError::ValidationError;
};
struct MeanNotZero : ValidationError {
    using ValidationError::ValidationError;
};
struct NotTangent : ValidationError {
    using ValidationError::ValidationError;
};
struct NotDiffeo : ValidationError {
    using ValidationError::ValidationError;
};
struct NotSymmetric : ValidationError {
    using ValidationError::ValidationError;
};
struct NotPositiveDefinite : ValidationError {
    using ValidationError::ValidationError;
};
struct SingularMatrix : ValidationError {
    using ValidationError::ValidationError;
};
struct DegenerateAngle : ValidationError {
    using ValidationError::ValidationError;
};

struct BlowUp : NumericalError {
    using NumericalError::NumericalError;
};
struct NewtonDiverged : NumericalError {
    using NumericalError::NumericalError;
};
struct ShootingDiverged : NumericalError {
    using NumericalError::NumericalError;
};

} // namespace infotrans
