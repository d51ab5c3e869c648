#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace permledger {

/// Stable error categories. The C API maps these onto its status codes.
enum class ErrorCode {
  InvalidParams,
  Decode,
  Validation,
  NotPermittedMiner,
  BlockTooLarge,
  InvalidTransaction,
  NotAuthorized,
  LastAdmin,
  Denied,
  DuplicateName,
  NoSuchStream,
  NotStreamWriter,
  ItemTooLarge,
  NotSubscribed,
  NotFound,
  UnknownRecipientKey,
  AccessDenied,
  CorruptEnvelope,
  ConsentDenied,
  InvalidTransition,
  BadSignature,
  StaleEvent,
  ProfileValidation,
  UnknownField,
  Config,
  EmptySamples,
  Io,
  Usage,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// A transaction inside a candidate block failed; `index` is its position.
class InvalidTransactionError : public Error {
 public:
  InvalidTransactionError(std::size_t index, ErrorCode cause, const std::string& detail)
      : Error(ErrorCode::InvalidTransaction,
              "transaction " + std::to_string(index) + " invalid: " + detail),
        index_(index),
        cause_(cause) {}

  std::size_t index() const noexcept { return index_; }
  ErrorCode cause() const noexcept { return cause_; }

 private:
  std::size_t index_;
  ErrorCode cause_;
};

enum class ValidationReason {
  DecodeError,
  ParamsMismatch,
  BrokenLink,
  HashMismatch,
  BadSignature,
  UnpermittedMiner,
  BadTimestamp,
  Oversize,
  InvalidTransaction,
  BadGenesis,
};

const char* to_string(ValidationReason reason) noexcept;

class ValidationError : public Error {
 public:
  ValidationError(std::uint64_t height, ValidationReason reason, const std::string& detail = {})
      : Error(ErrorCode::Validation,
              "block " + std::to_string(height) + ": " + to_string(reason) +
                  (detail.empty() ? std::string{} : " (" + detail + ")")),
        height_(height),
        reason_(reason) {}

  std::uint64_t height() const noexcept { return height_; }
  ValidationReason reason() const noexcept { return reason_; }

 private:
  std::uint64_t height_;
  ValidationReason reason_;
};

class ConsentDeniedError : public Error {
 public:
  ConsentDeniedError(std::string user, std::string grantee, std::vector<std::string> missing);

  const std::string& user() const noexcept { return user_; }
  const std::string& grantee() const noexcept { return grantee_; }
  const std::vector<std::string>& missing_fields() const noexcept { return missing_; }

 private:
  std::string user_;
  std::string grantee_;
  std::vector<std::string> missing_;
};

class ProfileValidationError : public Error {
 public:
  ProfileValidationError(std::string field, const std::string& reason)
      : Error(ErrorCode::ProfileValidation, field + ": " + reason), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace permledger
