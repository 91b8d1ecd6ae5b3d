#pragma once

#include <stdexcept>
#include <string>

namespace adinvest {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// (p, m) pair not present in a site's action set.
struct InvalidActionError : Error {
    using Error::Error;
};

/// An action whose realizable frame length can be zero (p = 0 and t_freeze = 0).
struct DegenerateFrameError : Error {
    using Error::Error;
};

/// Caller broke a documented precondition (negative delta, factor out of range, ...).
struct ContractViolation : Error {
    using Error::Error;
};

/// No finite relative-error index < 1 exists for a model pair.
struct QualityUndefinedError : Error {
    using Error::Error;
};

/// Malformed or inconsistent configuration input.
struct ConfigError : Error {
    using Error::Error;
};

/// Simulation horizon shorter than the longest possible frame.
struct InsufficientHorizonError : Error {
    using Error::Error;
};

}  // namespace adinvest
