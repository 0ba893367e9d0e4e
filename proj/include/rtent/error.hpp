#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace rtent {

/// Thrown when a caller hands in parameters outside an operation's domain.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a request would exceed the engine's resource limits.
class ResourceLimit : public std::length_error {
public:
    using std::length_error::length_error;
};

namespace detail {

inline void require(bool condition, const std::string &message) {
    if (!condition) {
        throw InvalidInput(message);
    }
}

inline void require_finite(double x, const char *name) {
    if (!std::isfinite(x)) {
        throw InvalidInput(std::string(name) + " must be finite");
    }
}

} // namespace detail
} // namespace rtent
