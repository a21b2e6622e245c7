#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fixrev {

// Every failure the engine reports carries one of these codes. CLI exit
// codes and python exceptions are derived from the code, not the message.
enum class ErrorCode {
    // fixity
    InvalidPath,
    DuplicatePath,
    UnsupportedFormat,
    CorruptArchive,
    InvalidDigest,
    // repository / transport
    NotFound,
    Timeout,
    TransportError,
    TooLarge,
    TooManyRedirects,
    FetchFailed,
    // workflow
    InvalidState,
    MissingDatasetRef,
    NoPendingRevision,
    ChainBroken,
    GapInSequence,
    LockHeld,
    // detection
    InconsistentContext,
    UnknownReporter,
    CategoryNotPolicyOnly,
    NotEditor,
    AlreadyResolved,
    UnknownFinding,
    // report / serialization
    SchemaInvalid,
    MissingAcceptanceRecord,
    // cli / io
    ScriptInvalid,
    ConfigInvalid,
    IoError,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code),
          cause_(code) {}

    // For wrapper errors (FetchFailed around a NotFound, say): cause keeps
    // the underlying code for classification.
    Error(ErrorCode code, const std::string& message, ErrorCode cause)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code),
          cause_(cause) {}

    ErrorCode code() const noexcept { return code_; }
    ErrorCode cause() const noexcept { return cause_; }

  private:
    ErrorCode code_;
    ErrorCode cause_;
};

}  // namespace fixrev
