#pragma once

#include <stdexcept>
#include <string>

namespace pairpump {

enum class ErrorCategory { invalid_argument, config, io, numerical };

inline const char* category_name(ErrorCategory c) {
    switch (c) {
    case ErrorCategory::invalid_argument: return "argument";
    case ErrorCategory::config: return "config";
    case ErrorCategory::io: return "io";
    case ErrorCategory::numerical: return "numerical";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}
    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

struct ArgumentError : Error {
    explicit ArgumentError(const std::string& what) : Error(ErrorCategory::invalid_argument, what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

struct NumericalError : Error {
    explicit NumericalError(const std::string& what) : Error(ErrorCategory::numerical, what) {}
};

} // namespace pairpump
