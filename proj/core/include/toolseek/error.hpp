#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace toolseek {

// Every failure a module can report. The service maps each value to exactly
// one (HTTP status, wire code) pair; see service.hpp.
enum class ErrorCode {
  MalformedDocument,
  InvariantViolation,
  UnknownCategory,
  MissingField,
  UnknownField,
  DuplicateName,
  InvalidUrl,
  InvalidEmail,
  UnknownTool,
  ImmutableField,
  ValidationFailed,
  Forbidden,
  DuplicateVersion,
  MintingFailed,
  StaleEvent,
  QueryTooLong,
  SyntaxError,
  PureNegation,
  DepthExceeded,
  EmptyPlan,
  BadFacetValue,
  InvalidWeights,
  PageOutOfRange,
  ExhaustedSpace,
  InvalidVersionLabel,
  UnknownUser,
  RatingOutOfRange,
  UnknownCollection,
  UnknownPublication,
  EmptyRoleSet,
  UnknownRole,
  PayloadTooLarge,
  NoSnapshot,
  StorageFailure,
};

inline constexpr std::array kAllErrorCodes = {
    ErrorCode::MalformedDocument,   ErrorCode::InvariantViolation, ErrorCode::UnknownCategory,
    ErrorCode::MissingField,        ErrorCode::UnknownField,       ErrorCode::DuplicateName,
    ErrorCode::InvalidUrl,          ErrorCode::InvalidEmail,       ErrorCode::UnknownTool,
    ErrorCode::ImmutableField,      ErrorCode::ValidationFailed,   ErrorCode::Forbidden,
    ErrorCode::DuplicateVersion,    ErrorCode::MintingFailed,      ErrorCode::StaleEvent,
    ErrorCode::QueryTooLong,        ErrorCode::SyntaxError,        ErrorCode::PureNegation,
    ErrorCode::DepthExceeded,       ErrorCode::EmptyPlan,          ErrorCode::BadFacetValue,
    ErrorCode::InvalidWeights,      ErrorCode::PageOutOfRange,     ErrorCode::ExhaustedSpace,
    ErrorCode::InvalidVersionLabel, ErrorCode::UnknownUser,        ErrorCode::RatingOutOfRange,
    ErrorCode::UnknownCollection,   ErrorCode::UnknownPublication, ErrorCode::EmptyRoleSet,
    ErrorCode::UnknownRole,         ErrorCode::PayloadTooLarge,    ErrorCode::NoSnapshot,
    ErrorCode::StorageFailure,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string field = {},
        std::optional<std::size_t> position = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  // Offending field path or identifier, empty when not applicable.
  const std::string& field() const noexcept { return field_; }
  // Character offset into the query for parser errors.
  std::optional<std::size_t> position() const noexcept { return position_; }

 private:
  ErrorCode code_;
  std::string field_;
  std::optional<std::size_t> position_;
};

}  // namespace toolseek
