#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace delnet {

/// Malformed or inconsistent arguments: dimension mismatch, non-stochastic row,
/// unknown variable name.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An exact enumeration would exceed the configured cap.
class EnumerationLimitError : public std::runtime_error {
public:
    EnumerationLimitError(const std::string& what, std::size_t requested, std::size_t cap)
        : std::runtime_error(what), requested_(requested), cap_(cap) {}

    std::size_t requested() const { return requested_; }
    std::size_t cap() const { return cap_; }

private:
    std::size_t requested_;
    std::size_t cap_;
};

/// Conditioning on an event of probability zero.
class ConditioningError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Cyclic or otherwise malformed network graph.
class GraphError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// separating_loss was asked to separate a pair that is in fact dominated.
class DominanceDetectedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Scenario configuration problem. `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

} // namespace delnet
