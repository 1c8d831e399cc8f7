#pragma once

#include <stdexcept>
#include <string>

namespace ewlab {

enum class ErrorKind {
    size,
    range,
    validation,
    window,
    non_invertible,
    length,
    precondition,
};

const char* to_string(ErrorKind kind);

// Violated precondition of a library operation. The message names the
// offending parameter; the CLI maps every ValidationError to exit code 2.
class ValidationError : public std::runtime_error {
public:
    ValidationError(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind)
    {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error("I/O error: " + what) {}
};

inline const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::size: return "size";
    case ErrorKind::range: return "range";
    case ErrorKind::validation: return "validation";
    case ErrorKind::window: return "window";
    case ErrorKind::non_invertible: return "non-invertible";
    case ErrorKind::length: return "length";
    case ErrorKind::precondition: return "precondition";
    }
    return "unknown";
}

} // namespace ewlab
