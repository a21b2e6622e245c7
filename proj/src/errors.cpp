#include "fixrev/errors.hpp"

namespace fixrev {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidPath: return "InvalidPath";
        case ErrorCode::DuplicatePath: return "DuplicatePath";
        case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
        case ErrorCode::CorruptArchive: return "CorruptArchive";
        case ErrorCode::InvalidDigest: return "InvalidDigest";
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::Timeout: return "Timeout";
        case ErrorCode::TransportError: return "TransportError";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::TooManyRedirects: return "TooManyRedirects";
        case ErrorCode::FetchFailed: return "FetchFailed";
        case ErrorCode::InvalidState: return "InvalidState";
        case ErrorCode::MissingDatasetRef: return "MissingDatasetRef";
        case ErrorCode::NoPendingRevision: return "NoPendingRevision";
        case ErrorCode::ChainBroken: return "ChainBroken";
        case ErrorCode::GapInSequence: return "GapInSequence";
        case ErrorCode::LockHeld: return "LockHeld";
        case ErrorCode::InconsistentContext: return "InconsistentContext";
        case ErrorCode::UnknownReporter: return "UnknownReporter";
        case ErrorCode::CategoryNotPolicyOnly: return "CategoryNotPolicyOnly";
        case ErrorCode::NotEditor: return "NotEditor";
        case ErrorCode::AlreadyResolved: return "AlreadyResolved";
        case ErrorCode::UnknownFinding: return "UnknownFinding";
        case ErrorCode::SchemaInvalid: return "SchemaInvalid";
        case ErrorCode::MissingAcceptanceRecord: return "MissingAcceptanceRecord";
        case ErrorCode::ScriptInvalid: return "ScriptInvalid";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

}  // namespace fixrev
