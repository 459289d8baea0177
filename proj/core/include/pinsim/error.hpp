#pragma once

#include <stdexcept>
#include <string>

namespace pinsim {

/// Broad failure class, used by the CLI to pick an exit code.
enum class ErrorCategory { Contract, Config, Data, Runtime };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

/// A precondition of an operation was violated (bad dimensions, values out of range).
class ContractError : public Error {
public:
    explicit ContractError(const std::string& what) : Error(ErrorCategory::Contract, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorCategory::Config, what) {}
};

/// Malformed, truncated or inconsistent input files.
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorCategory::Data, what) {}
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw ContractError(message);
}

}  // namespace pinsim
