#pragma once

#include <stdexcept>
#include <string>

namespace stopmax {

/// Bad argument outside an operation's domain (negative level, time past the horizon, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A quadrature or root-finding tolerance could not be met.
class ToleranceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A scalar residual had no sign change on the bracket it was given.
class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A boundary table was used with a problem it was not solved for.
class SpecMismatchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed run configuration or input file.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace stopmax
