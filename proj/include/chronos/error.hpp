#pragma once

#include <stdexcept>
#include <string>

namespace chronos {

/// Bad input: malformed files, empty sets, values outside their domain.
class UsageError : public std::invalid_argument {
public:
    explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

/// Inputs that are individually well-formed but do not fit together,
/// e.g. a harmonic dispatcher on a non-harmonic timer group.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A file could not be read or written.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// A dispatcher data-structure invariant was found broken.
class InvariantViolation : public std::logic_error {
public:
    explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace chronos
