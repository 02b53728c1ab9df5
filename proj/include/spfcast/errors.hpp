#pragma once

#include <stdexcept>
#include <string>

namespace spfcast {

/// Stable error categories; the C API maps these 1:1 onto status codes.
enum class ErrorCode {
    InvalidArgument,
    Domain,               // argument outside mathematical domain (e.g. p not in (0,1))
    Unsupported,          // operation undefined for the variant (e.g. pdf of an ensemble)
    MissingVintage,
    NoDataYet,            // no vintage released at or before the issue quarter
    PendingObservation,   // target quarter not covered by the evaluation vintage
    InsufficientPanel,    // fewer than two survey members
    InsufficientHistory,  // window longer than the available rate history
    InsufficientData,     // generic too-few-observations (DM test, aggregation)
    InsufficientTraining, // too few training rows for a fit
    FitFailure,
    Alignment,            // loss series disagree on quarters or horizon
    EmptyPeriod,
    Parse,
    Config,
    Io,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace spfcast
