#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lglab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParams : public Error {
public:
    using Error::Error;
};

/// Jacobian requested exactly on the refuge line x = m.
class KinkPoint : public Error {
public:
    using Error::Error;
};

class NumericalFailure : public Error {
public:
    using Error::Error;
};

class NotAnEquilibrium : public Error {
public:
    using Error::Error;
};

class NonHyperbolicPresent : public Error {
public:
    using Error::Error;
};

class NoHopf : public Error {
public:
    using Error::Error;
};

class Inconclusive : public Error {
public:
    using Error::Error;
};

class TooShort : public Error {
public:
    using Error::Error;
};

class NonFinite : public Error {
public:
    using Error::Error;
};

/// Errors that carry the index of the offending integration step.
class StepError : public Error {
public:
    StepError(const std::string& what, std::size_t step) : Error(what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class StepTooLarge : public StepError {
public:
    using StepError::StepError;
};

class PositivityViolation : public StepError {
public:
    using StepError::StepError;
};

}  // namespace lglab
