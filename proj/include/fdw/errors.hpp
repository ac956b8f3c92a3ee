#ifndef FDW_ERRORS_HPP
#define FDW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fdw {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape or grid mismatch between operands.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// A user supplied parameter is outside its admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A decomposition failed or produced non-finite output.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Non-finite state encountered while time stepping.
class BlowupError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The requested dense problem exceeds the configured size budget.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// Input that leaves nothing to compute (empty subspace, empty zero set, ...).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// A fit window holds too few samples or non-positive energies.
class DegenerateFitError : public Error {
public:
    using Error::Error;
};

/// A resolvent scan hit a (numerically) singular shift.
class InBandEigenvalueError : public NumericalError {
public:
    InBandEigenvalueError(const std::string& what, double lambda)
        : NumericalError(what), lambda_(lambda) {}
    double lambda() const noexcept { return lambda_; }

private:
    double lambda_;
};

}  // namespace fdw

#endif  // FDW_ERRORS_HPP
