#pragma once

#include <stdexcept>
#include <string>

namespace rch {

/// Bad configuration: grid rules, index ranges, malformed config values.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical setup failure (e.g. root solve without a real root).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input files / IO failures.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rch
