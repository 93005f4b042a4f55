#pragma once

#include <stdexcept>
#include <string>

namespace twaust {

/// Bad caller input: wrong dimensions, non-finite entries, unsupported sizes.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A jet expression was evaluated outside the domain of one of its primitives.
class DomainError : public std::domain_error {
public:
    DomainError(const std::string& primitive, const std::string& what)
        : std::domain_error(primitive + ": " + what), primitive_(primitive) {}

    const std::string& primitive() const noexcept { return primitive_; }

private:
    std::string primitive_;
};

/// Per-point geometric failure (rank-deficient Jacobian, degenerate normal seed).
/// Sample loops catch these and count the point as skipped.
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ImmersionError : public GeometryError {
public:
    using GeometryError::GeometryError;
};

class DegenerateReferenceError : public GeometryError {
public:
    using GeometryError::GeometryError;
};

/// Numerical procedure failed to reach its a-posteriori accuracy target.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ClassificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace twaust
