#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chefs {

enum class ErrorCode {
    Io,
    MalformedFile,
    MalformedRow,
    MalformedPath,
    DuplicateTerm,
    SchemaConflict,
    InvalidConfig,
    InvalidPartition,
    UnknownSelection,
    UnknownReport,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every recoverable failure raised by the library.
/// The code lets callers (the CLI in particular) map failures onto exit statuses.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace chefs
