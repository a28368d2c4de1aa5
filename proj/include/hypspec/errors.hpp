#pragma once

#include <stdexcept>
#include <string>

namespace hypspec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad parameter, bad config).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed to reach its contract: non-convergence,
/// tolerance not met, integrator breakdown, overflow.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

}  // namespace hypspec
