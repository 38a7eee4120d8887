#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace envforge {

enum class ErrorCode {
    ParseFailure,
    SessionTerminated,
    GenerationExhausted,
    InfeasibleTask,
    InfeasibleGoal,
    EmptyInput,
    ZeroBaseline,
    KeyMismatch,
    InsufficientEntries,
    GroupTooSmall,
    LengthMismatch,
    PolicyFailure,
    BadConfig,
    BadRequest,
    UnknownSession,
    Busy,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure the library reports carries one of the codes above; the
// service layer forwards the code verbatim on the wire.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace envforge
