#pragma once

#include <stdexcept>
#include <string>

namespace efeo {

/// Precondition or schema violation in caller-supplied data.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to produce a trustworthy result.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be read, written or parsed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define EFEO_REQUIRE(cond, msg)                                   \
    do {                                                          \
        if (!(cond)) throw ::efeo::InvalidArgument(msg);          \
    } while (0)

}  // namespace efeo
