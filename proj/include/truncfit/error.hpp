#pragma once

#include <stdexcept>
#include <string>

namespace truncfit {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad arguments or violated preconditions.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed model literal, CSV row or config entry.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A model assigns (numerically) zero density to a point it must explain.
class SupportMismatch : public Error {
public:
    SupportMismatch(const std::string& what, double point)
        : Error(what), point_(point) {}

    double point() const noexcept { return point_; }

private:
    double point_;
};

/// The family/parameter combination has no one-parameter exponential form.
class UnsupportedForm : public Error {
public:
    using Error::Error;
};

/// Minimization or root finding could not produce an answer.
class OptimizerError : public Error {
public:
    using Error::Error;
};

class NoRootError : public OptimizerError {
public:
    using OptimizerError::OptimizerError;
};

}  // namespace truncfit
