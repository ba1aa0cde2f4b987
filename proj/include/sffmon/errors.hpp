#pragma once

#include <stdexcept>
#include <string>

namespace sffmon {

/// Bad arguments or violated preconditions (exit code 2 at the CLI).
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Request exceeds configured resource caps (exit code 3 at the CLI).
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// Curve analysis could not locate the requested feature (exit code 4).
class FeatureNotFoundError : public std::runtime_error {
public:
    explicit FeatureNotFoundError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input file; carries a byte offset or line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, long long offset)
        : std::runtime_error(what + " (offset " + std::to_string(offset) + ")"),
          offset_(offset) {}
    explicit ParseError(const std::string& what) : std::runtime_error(what), offset_(-1) {}
    long long offset() const { return offset_; }

private:
    long long offset_;
};

/// SDE step size violates the stability guard; names the admissible dt.
class StepSizeError : public ValidationError {
public:
    StepSizeError(double requested, double required)
        : ValidationError("time step " + std::to_string(requested) +
                          " violates the stability guard; need dt <= " +
                          std::to_string(required)),
          required_(required) {}
    double required_dt() const { return required_; }

private:
    double required_;
};

} // namespace sffmon
