#include "permledger/error.hpp"

namespace permledger {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::Decode: return "DecodeError";
    case ErrorCode::Validation: return "ValidationError";
    case ErrorCode::NotPermittedMiner: return "NotPermittedMiner";
    case ErrorCode::BlockTooLarge: return "BlockTooLarge";
    case ErrorCode::InvalidTransaction: return "InvalidTransaction";
    case ErrorCode::NotAuthorized: return "NotAuthorized";
    case ErrorCode::LastAdmin: return "LastAdmin";
    case ErrorCode::Denied: return "Denied";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::NoSuchStream: return "NoSuchStream";
    case ErrorCode::NotStreamWriter: return "NotStreamWriter";
    case ErrorCode::ItemTooLarge: return "ItemTooLarge";
    case ErrorCode::NotSubscribed: return "NotSubscribed";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::UnknownRecipientKey: return "UnknownRecipientKey";
    case ErrorCode::AccessDenied: return "AccessDenied";
    case ErrorCode::CorruptEnvelope: return "CorruptEnvelope";
    case ErrorCode::ConsentDenied: return "ConsentDenied";
    case ErrorCode::InvalidTransition: return "InvalidTransition";
    case ErrorCode::BadSignature: return "BadSignature";
    case ErrorCode::StaleEvent: return "StaleEvent";
    case ErrorCode::ProfileValidation: return "ValidationError";
    case ErrorCode::UnknownField: return "UnknownField";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::EmptySamples: return "EmptySamples";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::Usage: return "UsageError";
  }
  return "Unknown";
}

const char* to_string(ValidationReason reason) noexcept {
  switch (reason) {
    case ValidationReason::DecodeError: return "decode-error";
    case ValidationReason::ParamsMismatch: return "params-mismatch";
    case ValidationReason::BrokenLink: return "broken-link";
    case ValidationReason::HashMismatch: return "hash-mismatch";
    case ValidationReason::BadSignature: return "bad-signature";
    case ValidationReason::UnpermittedMiner: return "unpermitted-miner";
    case ValidationReason::BadTimestamp: return "bad-timestamp";
    case ValidationReason::Oversize: return "oversize";
    case ValidationReason::InvalidTransaction: return "invalid-transaction";
    case ValidationReason::BadGenesis: return "bad-genesis";
  }
  return "unknown";
}

namespace {

std::string join_fields(const std::vector<std::string>& fields) {
  std::string out;
  for (const auto& f : fields) {
    if (!out.empty()) out += ",";
    out += f;
  }
  return out;
}

}  // namespace

ConsentDeniedError::ConsentDeniedError(std::string user, std::string grantee,
                                       std::vector<std::string> missing)
    : Error(ErrorCode::ConsentDenied, "consent denied for user " + user + " to " + grantee +
                                          ": missing {" + join_fields(missing) + "}"),
      user_(std::move(user)),
      grantee_(std::move(grantee)),
      missing_(std::move(missing)) {}

}  // namespace permledger
