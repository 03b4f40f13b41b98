#pragma once

#include <stdexcept>
#include <string>

namespace tribesim {

enum class ErrorCode {
    invalid_argument,
    self_loop_rejected,
    empty_graph,
    parse_error,
    validation_error,
    io_error,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid-argument";
        case ErrorCode::self_loop_rejected: return "self-loop-rejected";
        case ErrorCode::empty_graph: return "empty-graph-error";
        case ErrorCode::parse_error: return "parse-error";
        case ErrorCode::validation_error: return "validation-error";
        case ErrorCode::io_error: return "io-error";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace tribesim
