#pragma once

#include <array>
#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "permledger/consent.hpp"
#include "permledger/sharing.hpp"

namespace permledger {

inline constexpr std::string_view kProfileFormat = "profile-v1";
inline constexpr std::array<std::string_view, 6> kProfileFields = {
    "name", "nationality", "contact_number", "purpose_of_visit", "stay_from", "stay_to"};

bool is_profile_field(std::string_view name);

using Date = std::chrono::year_month_day;

/// Strict ISO calendar date (YYYY-MM-DD). Throws ProfileValidationError.
Date parse_date(std::string_view field, std::string_view text);
std::string format_date(const Date& d);

/// Every field except user_id is optional so that partial (imported)
/// profiles share the type.
struct UserProfile {
  std::string user_id;
  std::optional<std::string> name;
  std::optional<std::string> nationality;
  std::optional<std::string> contact_number;
  std::optional<std::string> purpose_of_visit;
  std::optional<Date> stay_from;
  std::optional<Date> stay_to;
  std::map<std::string, bool> share_flags;

  FieldSet present_fields() const;
  /// Field value in document form (dates as ISO strings).
  std::optional<std::string> field(std::string_view name) const;
  /// Copy keeping only `fields` (and user_id); share flags are dropped.
  UserProfile project(const FieldSet& fields) const;

  bool operator==(const UserProfile&) const = default;
};

/// Trims surrounding whitespace and removes control characters.
std::string sanitize(std::string_view raw);

/// Rules for any field that is present. `require_name` additionally demands a
/// name, as for locally ingested records. Throws ProfileValidationError.
void validate_profile(const UserProfile& profile, bool require_name);

/// Canonical document: sorted keys, ISO dates, format tag, user_id and
/// exactly the requested fields. Throws Error(UnknownField).
std::string to_open_format(const UserProfile& profile, const FieldSet& fields);
/// Parses and validates a document. Throws Error(UnknownField) or
/// ProfileValidationError.
UserProfile from_open_format(std::string_view document);

struct Provenance {
  enum class Kind { Local, Imported };
  Kind kind = Kind::Local;
  Address source;
  std::string item_id;

  bool operator==(const Provenance&) const = default;
};

struct StoredProfile {
  UserProfile profile;
  Provenance provenance;

  bool operator==(const StoredProfile&) const = default;
};

/// One enterprise's off-chain profile store.
class Repository {
 public:
  /// Sanitizes and validates a raw profile document; share flags default to
  /// false. The document may omit the format tag and may carry a
  /// `share_flags` object. Throws ProfileValidationError, Error(UnknownField).
  const UserProfile& ingest(std::string_view raw_document);

  const StoredProfile* find(std::string_view user_id) const;
  const std::map<std::string, StoredProfile, std::less<>>& records() const { return records_; }
  void store(StoredProfile record);

  std::string to_json() const;
  static Repository from_json(std::string_view text);
  /// Missing file yields an empty repository. Throws Error(Io).
  static Repository load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  bool operator==(const Repository&) const = default;

 private:
  std::map<std::string, StoredProfile, std::less<>> records_;
};

/// Fields of `user_id` that every recipient is consented to receive and
/// that the stored profile actually holds.
FieldSet publishable_fields(const Repository& repo, const ChainState& state, const std::string& user_id,
                            std::span<const Address> recipients);

/// Shares the consented projection of a stored profile. Throws
/// ConsentDeniedError when no field may go to some recipient, Error(NotFound)
/// for unknown users, and sharing errors.
ShareResult publish_profile(const Repository& repo, Wallet& wallet, const ChainState& state,
                            const std::string& user_id, std::span<const Address> recipients);

/// Decrypts, parses and stores a shared profile. Nothing is stored on error.
const UserProfile& import_profile(Repository& repo, const NodeIdentity& reader, const ChainState& state,
                                  const StreamView& view, std::string_view item_id);

}  // namespace permledger
