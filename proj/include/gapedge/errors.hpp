#pragma once

#include <stdexcept>
#include <string>

namespace gapedge {

/// Base class for every error raised by the library. The CLI maps
/// `InvalidInput` to the invariant-violation exit code and everything else
/// to the module-error exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A pivot could not be made nonzero by the retry policy.
class NumericalBreakdown : public Error {
public:
    NumericalBreakdown(const std::string& what, double shift)
        : Error(what + " (shift " + std::to_string(shift) + ")"), shift_(shift) {}
    double shift() const noexcept { return shift_; }

private:
    double shift_;
};

/// Step size underflow in the adaptive integrator.
class StiffnessError : public Error {
public:
    StiffnessError(const std::string& what, double t)
        : Error(what + " (reached t = " + std::to_string(t) + ")"), t_(t) {}
    double reached() const noexcept { return t_; }

private:
    double t_;
};

class BracketError : public Error {
public:
    using Error::Error;
};

class TruncationError : public Error {
public:
    using Error::Error;
};

class SingularityError : public Error {
public:
    using Error::Error;
};

}  // namespace gapedge
