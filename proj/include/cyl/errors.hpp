#pragma once

#include <stdexcept>
#include <string>

namespace cyl {

// Configuration / validation problems: bad schema, bad values, precondition
// violations on user-supplied data. CLI exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failures: non-finite input, divergent iteration, overflow,
// decomposition outside the open cell. CLI exit code 3.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Data-shape problems detected mid-computation: identity conjugacy class,
// insufficient samples, window outside populated range, unsupported holonomy.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InsufficientDataError : DataError {
    InsufficientDataError(const std::string& msg, long count)
        : DataError(msg + " (have " + std::to_string(count) + ")"), count(count) {}
    long count;
};

}  // namespace cyl
