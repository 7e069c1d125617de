#include "voidd/error.hpp"

namespace voidd {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::Format: return "format-error";
        case ErrorKind::Validation: return "validation-error";
        case ErrorKind::DegenerateGeometry: return "degenerate-geometry";
        case ErrorKind::DegenerateSkeleton: return "degenerate-skeleton";
        case ErrorKind::Io: return "io-error";
    }
    return "unknown-error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), detail_(message) {}

void throw_invalid_argument(const std::string& message) {
    throw Error(ErrorKind::InvalidArgument, message);
}

void throw_validation(const std::string& field, const std::string& message) {
    throw Error(ErrorKind::Validation, field + ": " + message);
}

}  // namespace voidd
