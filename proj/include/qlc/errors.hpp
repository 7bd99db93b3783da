#pragma once

#include <stdexcept>
#include <string>

namespace qlc {

/// Raised when an operation's physical or protocol precondition does not hold.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised for malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& msg, int line = 0, std::string field = {})
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line), field_(std::move(field)) {}

    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    int line_;
    std::string field_;
};

}  // namespace qlc
