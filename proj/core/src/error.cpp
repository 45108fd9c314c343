#include "adaptbpe/error.hpp"

namespace adaptbpe {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::ImproperMerge: return "ImproperMerge";
        case ErrorCode::DuplicateSymbol: return "DuplicateSymbol";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::UnknownByte: return "UnknownByte";
        case ErrorCode::UnknownId: return "UnknownId";
        case ErrorCode::UnknownToken: return "UnknownToken";
        case ErrorCode::UnsupportedPattern: return "UnsupportedPattern";
        case ErrorCode::UnsupportedModelType: return "UnsupportedModelType";
        case ErrorCode::MalformedMerge: return "MalformedMerge";
        case ErrorCode::VocabMergeMismatch: return "VocabMergeMismatch";
        case ErrorCode::BudgetTooLarge: return "BudgetTooLarge";
        case ErrorCode::InvalidBudget: return "InvalidBudget";
        case ErrorCode::EmptyCorpus: return "EmptyCorpus";
        case ErrorCode::InsufficientLiveMerges: return "InsufficientLiveMerges";
        case ErrorCode::EmptySet: return "EmptySet";
        case ErrorCode::DigestMismatch: return "DigestMismatch";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Error";
}

}  // namespace adaptbpe
