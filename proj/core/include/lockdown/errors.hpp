#pragma once

#include <stdexcept>
#include <string>

namespace lockdown {

// Base for every error raised by the library. Callers that only care about
// "the solve failed" can catch this one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An argument violates an operation's precondition (bad alpha, t0 outside
// [0, T], s <= 0 in a logarithm, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// A standing model hypothesis is not met, e.g. S0 <= S_herd for the
// reachability threshold.
class PreconditionError : public DomainError {
public:
    using DomainError::DomainError;
};

// RK4 produced a non-finite state; usually dt is far too large.
class IntegrationError : public Error {
public:
    using Error::Error;
};

// A control does not line up with the time grid of the trajectory it is
// paired with.
class GridMismatchError : public Error {
public:
    using Error::Error;
};

// A bracketing root solve could not find a sign change.
class BracketError : public Error {
public:
    using Error::Error;
};

// I(t) became too small on the lockdown window for the psi quadrature to be
// meaningful.
class UnderflowError : public Error {
public:
    using Error::Error;
};

// The requested immunity level cannot be reached with the given lockdown
// intensity.
class UnreachableTargetError : public Error {
public:
    using Error::Error;
};

}  // namespace lockdown
