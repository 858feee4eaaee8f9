#include "toolseek/error.hpp"

namespace toolseek {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::UnknownCategory: return "UnknownCategory";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::UnknownField: return "UnknownField";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::InvalidUrl: return "InvalidUrl";
    case ErrorCode::InvalidEmail: return "InvalidEmail";
    case ErrorCode::UnknownTool: return "UnknownTool";
    case ErrorCode::ImmutableField: return "ImmutableField";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::Forbidden: return "Forbidden";
    case ErrorCode::DuplicateVersion: return "DuplicateVersion";
    case ErrorCode::MintingFailed: return "MintingFailed";
    case ErrorCode::StaleEvent: return "StaleEvent";
    case ErrorCode::QueryTooLong: return "QueryTooLong";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::PureNegation: return "PureNegation";
    case ErrorCode::DepthExceeded: return "DepthExceeded";
    case ErrorCode::EmptyPlan: return "EmptyPlan";
    case ErrorCode::BadFacetValue: return "BadFacetValue";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::PageOutOfRange: return "PageOutOfRange";
    case ErrorCode::ExhaustedSpace: return "ExhaustedSpace";
    case ErrorCode::InvalidVersionLabel: return "InvalidVersionLabel";
    case ErrorCode::UnknownUser: return "UnknownUser";
    case ErrorCode::RatingOutOfRange: return "RatingOutOfRange";
    case ErrorCode::UnknownCollection: return "UnknownCollection";
    case ErrorCode::UnknownPublication: return "UnknownPublication";
    case ErrorCode::EmptyRoleSet: return "EmptyRoleSet";
    case ErrorCode::UnknownRole: return "UnknownRole";
    case ErrorCode::PayloadTooLarge: return "PayloadTooLarge";
    case ErrorCode::NoSnapshot: return "NoSnapshot";
    case ErrorCode::StorageFailure: return "StorageFailure";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string message, std::string field,
             std::optional<std::size_t> position)
    : std::runtime_error(std::move(message)),
      code_(code),
      field_(std::move(field)),
      position_(position) {}

}  // namespace toolseek
