#pragma once

#include <stdexcept>
#include <string>

namespace bray {

// Error taxonomy. The numeric groups map onto process exit codes and the
// C API status values: config -> 2, numeric -> 3, io -> 4.
enum class ErrorCode {
    DomainViolation,
    DegenerateGeometry,
    InvalidMeasurement,
    InvalidProfile,
    SubcriticalityViolation,
    Underflow,
    NumericFailure,
    ConfigError,
    IoError,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

inline int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigError: return 2;
        case ErrorCode::IoError: return 4;
        default: return 3;
    }
}

}  // namespace bray
