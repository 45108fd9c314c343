#pragma once

#include <stdexcept>
#include <string>

namespace adaptbpe {

enum class ErrorCode {
    ImproperMerge,
    DuplicateSymbol,
    OutOfRange,
    UnknownByte,
    UnknownId,
    UnknownToken,
    UnsupportedPattern,
    UnsupportedModelType,
    MalformedMerge,
    VocabMergeMismatch,
    BudgetTooLarge,
    InvalidBudget,
    EmptyCorpus,
    InsufficientLiveMerges,
    EmptySet,
    DigestMismatch,
    SchemaError,
    IoError,
};

const char* error_code_name(ErrorCode code);

// All library failures throw Error. what() starts with the code name so the
// CLI can surface it verbatim and map it to a deterministic exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace adaptbpe
