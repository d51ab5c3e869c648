#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "permledger/bytes.hpp"
#include "permledger/crypto.hpp"
#include "permledger/identity.hpp"

namespace permledger {

enum class ConsentState : std::uint8_t { Active = 1, Withdrawn = 2 };
enum class ConsentEventKind : std::uint8_t { Grant = 1, Alter = 2, Withdraw = 3 };

const char* to_string(ConsentState s);
const char* to_string(ConsentEventKind k);

inline constexpr std::string_view kAnyGrantee = "*";
/// Stream holding consent events; created at bootstrap.
inline constexpr std::string_view kConsentStream = "consent";

using FieldSet = std::set<std::string>;

/// A user-signed change to one (user, grantee) consent record.
/// `user_id` is the address of the user's own signing key, so only that key
/// can produce a valid event for it. `sequence` must equal the record's next
/// version, which makes replayed events fail.
struct ConsentEvent {
  ConsentEventKind kind = ConsentEventKind::Grant;
  std::string user_id;
  std::string grantee;
  FieldSet fields;
  std::uint64_t sequence = 1;
  TimestampMs issued_at = 0;
  crypto::PublicKey signer_key{};
  crypto::Signature signature{};

  static ConsentEvent make(const NodeIdentity& user, ConsentEventKind kind, std::string grantee,
                           FieldSet fields, std::uint64_t sequence, TimestampMs issued_at);

  Bytes body() const;
  bool signature_valid() const;
  Bytes encode() const;
  static ConsentEvent decode(ByteView data);

  bool operator==(const ConsentEvent&) const = default;
};

struct ConsentRecord {
  std::string user_id;
  std::string grantee;
  FieldSet allowed_fields;
  ConsentState state = ConsentState::Active;
  std::uint64_t version = 0;
  TimestampMs updated_at = 0;

  FieldSet effective_fields() const { return state == ConsentState::Active ? allowed_fields : FieldSet{}; }
  bool operator==(const ConsentRecord&) const = default;
};

/// GRANT: absent|WITHDRAWN -> ACTIVE; ALTER: ACTIVE -> ACTIVE; WITHDRAW: ACTIVE -> WITHDRAWN.
/// Throws Error(BadSignature), Error(InvalidTransition), Error(StaleEvent).
ConsentRecord transition(const std::optional<ConsentRecord>& record, const ConsentEvent& event);

struct GateResult {
  bool ok = false;
  std::vector<std::string> missing;
};

class ConsentTable {
 public:
  using Key = std::pair<std::string, std::string>;

  /// Transition plus audit-trail append; the table is unchanged on error.
  void apply(const ConsentEvent& event);

  const ConsentRecord* find(const std::string& user, const std::string& grantee) const;
  std::uint64_t next_sequence(const std::string& user, const std::string& grantee) const;
  const std::map<Key, ConsentRecord>& records() const { return records_; }
  std::vector<ConsentEvent> audit_trail(const std::string& user) const;
  std::size_t event_count() const;

  bool operator==(const ConsentTable&) const = default;

 private:
  std::map<Key, ConsentRecord> records_;
  std::map<std::string, std::vector<ConsentEvent>> trails_;
};

/// ok iff the ACTIVE records for (user, grantee) and (user, "*") together
/// cover every requested field. Without an ACTIVE record the gate denies
/// even an empty request.
GateResult gate_share(const ConsentTable& table, const std::string& user, const std::string& grantee,
                      const FieldSet& fields);

/// Fields currently shareable from `user` to `grantee`.
FieldSet consented_fields(const ConsentTable& table, const std::string& user, const std::string& grantee);

/// Folds a trail from the empty table; used to cross-check the live table.
ConsentTable replay(const std::vector<ConsentEvent>& events);

}  // namespace permledger
