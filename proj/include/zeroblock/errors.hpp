#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace zeroblock {

//! Argument outside the mathematical domain of an operation (t = 0, sigma > n, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

//! A documented precondition of an operation was violated by the caller.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

//! Not enough data to perform the operation (e.g. difficulty retarget history).
class InsufficientHistoryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

//! Events were fed to a miner out of order. Indicates a simulator bug.
class SequencingError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

//! Invalid simulation or scenario configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/** Malformed text input. Carries the 1-based line number (0 when not line specific). */
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error(what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace zeroblock
