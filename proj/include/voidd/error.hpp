#pragma once

#include <stdexcept>
#include <string>

namespace voidd {

enum class ErrorKind {
    InvalidArgument,
    Format,
    Validation,
    DegenerateGeometry,
    DegenerateSkeleton,
    Io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Library-wide exception. The kind selects the CLI exit code: validation-like
/// kinds map to 1, I/O and format problems map to 2.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    /// Message without the kind prefix.
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

[[noreturn]] void throw_invalid_argument(const std::string& message);
[[noreturn]] void throw_validation(const std::string& field, const std::string& message);

}  // namespace voidd
