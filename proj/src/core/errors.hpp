#pragma once

#include <stdexcept>
#include <string>

namespace geofuse {

/// Input lies outside the mathematical domain of an operation
/// (e.g. logarithm at a rotation of pi radians).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Innovation covariance is numerically singular (condition number > 1e12).
struct SingularInnovation : std::runtime_error {
    explicit SingularInnovation(const std::string& msg) : std::runtime_error(msg) {}
};

/// The two prior ellipsoids admit no valid convex combination (d^2 >= 1).
struct EmptyIntersection : std::runtime_error {
    explicit EmptyIntersection(const std::string& msg) : std::runtime_error(msg) {}
};

/// Scenario or CLI configuration is malformed.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// An internal consistency assertion failed (indicates a bug, not bad input).
struct InternalError : std::logic_error {
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace geofuse
