#pragma once

#include <stdexcept>
#include <string>

namespace fracfilter {

// Error taxonomy shared by the library and the CLI. The CLI maps each type to
// an exit code (see app.hpp).

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public IoError {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : IoError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Non-finite values or a violated numerical bound (e.g. imaginary residue).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fracfilter
