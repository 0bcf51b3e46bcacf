#pragma once

#include <stdexcept>
#include <string>

namespace dbo {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Construction given a size that cannot form the requested object (e.g. K = 0).
struct InvalidSizeError : Error {
    using Error::Error;
};

// A weighting scheme applied to a graph it is not defined for.
struct SchemeMismatchError : Error {
    using Error::Error;
};

// A constructed object violates the standing assumptions of the method
// (e.g. a mixing matrix whose second eigenvalue magnitude reaches 1).
struct AssumptionViolationError : Error {
    using Error::Error;
};

// Malformed input text; carries the 1-based line number of the offending line.
struct ParseError : Error {
    long line;
    ParseError(const std::string& msg, long line_)
        : Error(msg + " (line " + std::to_string(line_) + ")"), line(line_) {}
};

// A caller broke an operation's precondition.
struct ContractViolationError : Error {
    using Error::Error;
};

// A batch of sample ids that cannot be evaluated (e.g. empty).
struct InvalidBatchError : ContractViolationError {
    using ContractViolationError::ContractViolationError;
};

// A sample id outside the node's shard.
struct ShardViolationError : ContractViolationError {
    using ContractViolationError::ContractViolationError;
};

// A vector or matrix of the wrong dimensions.
struct ShapeError : ContractViolationError {
    using ContractViolationError::ContractViolationError;
};

// Invalid or inconsistent configuration values.
struct ConfigError : Error {
    using Error::Error;
};

// A file that cannot be opened, read, or written.
struct IoError : Error {
    using Error::Error;
};

// An iterate left the finite range; carries the iteration at which it happened.
struct DivergenceError : Error {
    long long iteration;
    DivergenceError(const std::string& msg, long long iteration_)
        : Error(msg + " (iteration " + std::to_string(iteration_) + ")"),
          iteration(iteration_) {}
};

}  // namespace dbo
