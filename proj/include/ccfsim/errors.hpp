#pragma once

#include <stdexcept>
#include <string>

namespace ccfsim {

// Bad user input: config file contents, CLI values. The CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Argument outside its mathematical domain (negative rate, probability above 1, ...).
struct DomainError : std::invalid_argument {
    explicit DomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

}  // namespace ccfsim
