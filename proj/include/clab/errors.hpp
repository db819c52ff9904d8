#pragma once

#include <stdexcept>
#include <string>

namespace clab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition or type invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A numeric routine failed to converge or produced an inconsistent result.
class NumericError : public Error {
public:
    NumericError(const std::string& what, std::string diagnostics)
        : Error(what + " [" + diagnostics + "]"), diagnostics_(std::move(diagnostics)) {}

    const std::string& diagnostics() const noexcept { return diagnostics_; }

private:
    std::string diagnostics_;
};

/// A computation would exceed its enumeration or memory budget.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// A test could not be built because the hypotheses are not separated.
class ConstructionError : public Error {
public:
    using Error::Error;
};

/// Hypothesis and alternative coincide, so the experiment is meaningless.
class DegenerateError : public Error {
public:
    using Error::Error;
};

}  // namespace clab
