#include "spfcast/errors.hpp"

namespace spfcast {

const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid-argument";
        case ErrorCode::Domain: return "domain";
        case ErrorCode::Unsupported: return "unsupported";
        case ErrorCode::MissingVintage: return "missing-vintage";
        case ErrorCode::NoDataYet: return "no-data-yet";
        case ErrorCode::PendingObservation: return "pending-observation";
        case ErrorCode::InsufficientPanel: return "insufficient-panel";
        case ErrorCode::InsufficientHistory: return "insufficient-history";
        case ErrorCode::InsufficientData: return "insufficient-data";
        case ErrorCode::InsufficientTraining: return "insufficient-training";
        case ErrorCode::FitFailure: return "fit-failure";
        case ErrorCode::Alignment: return "alignment";
        case ErrorCode::EmptyPeriod: return "empty-period";
        case ErrorCode::Parse: return "parse";
        case ErrorCode::Config: return "config";
        case ErrorCode::Io: return "io";
    }
    return "unknown";
}

}  // namespace spfcast
