#pragma once

#include <stdexcept>
#include <string>

namespace sfde {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A query time or interval outside the domain of a path.
class OutOfDomainError : public Error {
public:
    using Error::Error;
};

class InvalidParameterError : public Error {
public:
    using Error::Error;
};

class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

class UnknownProblemError : public Error {
public:
    using Error::Error;
};

class InvalidScenarioError : public Error {
public:
    using Error::Error;
};

// Euler state left the finite range. `step` is the first bad step index,
// `resolution` the step count of the grid being integrated (-1 if unknown).
class NonFiniteError : public Error {
public:
    NonFiniteError(const std::string& msg, int step_index, int resolution_n = -1)
        : Error(msg), step(step_index), resolution(resolution_n) {}
    int step;
    int resolution;
};

// More than the tolerated fraction of ensemble members aborted; averaging the
// survivors would bias the estimate.
class TooManyAbortsError : public Error {
public:
    using Error::Error;
};

}  // namespace sfde
