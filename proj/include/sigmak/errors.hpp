#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sigmak {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (k out of range,
/// spectrum outside a cone where an inequality is only asserted inside it).
class DomainError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t offset)
        : Error(msg + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Numerical evaluation of an expression failed; `node()` is the printed
/// subexpression that produced the invalid operation.
class EvalError : public Error {
public:
    EvalError(const std::string& msg, std::string node)
        : Error(msg + " in '" + node + "'"), node_(std::move(node)) {}

    const std::string& node() const noexcept { return node_; }

private:
    std::string node_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// The tensor left the cone required by the equation at some grid node.
class AdmissibilityError : public Error {
public:
    AdmissibilityError(const std::string& msg, std::size_t node, double margin)
        : Error(msg), node_(node), margin_(margin) {}

    std::size_t node() const noexcept { return node_; }
    double margin() const noexcept { return margin_; }

private:
    std::size_t node_;
    double margin_;
};

/// sigma_{k-1} fell below the division floor in a quotient-form evaluation.
class SingularityError : public Error {
public:
    SingularityError(const std::string& msg, std::size_t node)
        : Error(msg), node_(node) {}

    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// No step length in the damped Newton line search kept the iterate admissible.
class ConeExitError : public Error {
public:
    using Error::Error;
};

class LinearSolveError : public Error {
public:
    using Error::Error;
};

}  // namespace sigmak
