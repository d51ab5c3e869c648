#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "permledger/chain_state.hpp"
#include "permledger/consent.hpp"
#include "permledger/streams.hpp"

namespace permledger {

inline constexpr std::string_view kPubkeysStream = "pubkeys";
inline constexpr std::string_view kItemsStream = "items";
inline constexpr std::string_view kAccessStream = "access";

/// AES-256-GCM with a random 96-bit nonce per item.
inline constexpr std::string_view kSymmetricScheme = "sym-v1";
/// Ephemeral X25519 -> HKDF-SHA256 -> AES-256-GCM over the item key.
inline constexpr std::string_view kWrapScheme = "wrap-v1";

struct AnnouncedKey {
  crypto::PublicKey signing{};
  crypto::PublicKey wrapping{};
};

/// Publishes the node's keys into the pubkeys stream under its address.
Transaction announce_pubkey(Wallet& wallet, const ChainState& state);
/// Latest announcement published by `address` itself. Throws Error(NotFound).
AnnouncedKey lookup_pubkey(const ChainState& state, const Address& address);

struct EnvelopeItem {
  std::string scheme_id;
  Bytes nonce;
  Bytes ciphertext;  // includes the GCM tag
  std::string item_id;  // hex digest of ciphertext

  static std::string compute_item_id(ByteView ciphertext);
  Bytes encode() const;
  /// Throws Error(CorruptEnvelope).
  static EnvelopeItem decode(ByteView data);

  bool operator==(const EnvelopeItem&) const = default;
};

struct AccessEntry {
  std::string item_id;
  Address recipient;
  std::string scheme_id;
  Bytes wrapped_key;  // ephemeral public key || nonce || sealed item key

  Bytes encode() const;
  /// Throws Error(CorruptEnvelope).
  static AccessEntry decode(ByteView data);

  bool operator==(const AccessEntry&) const = default;
};

EnvelopeItem seal_item(const crypto::SymmetricKey& key, ByteView plaintext);
/// Throws Error(CorruptEnvelope) on any authentication failure.
Bytes open_item(const EnvelopeItem& item, const crypto::SymmetricKey& key);

AccessEntry wrap_item_key(const crypto::SymmetricKey& key, const std::string& item_id, const Address& recipient,
                          const crypto::PublicKey& recipient_wrap_key);
/// Throws Error(CorruptEnvelope).
crypto::SymmetricKey unwrap_item_key(const AccessEntry& entry, const NodeIdentity& recipient);

/// When present, each recipient other than the owner must pass the consent
/// gate for (user_id, recipient, fields).
struct ConsentScope {
  std::string user_id;
  FieldSet fields;
};

struct ShareResult {
  std::string item_id;
  std::vector<Address> recipients;  // owner first, then the requested recipients
  std::vector<Transaction> transactions;  // envelope publish, then one access entry each
};

/// Encrypts under a fresh key and wraps it for the owner and every recipient.
/// Throws Error(Denied), Error(UnknownRecipientKey), ConsentDeniedError, or
/// stream errors from publish.
ShareResult share_data(Wallet& owner, const ChainState& state, ByteView plaintext,
                       std::span<const Address> recipients, const std::optional<ConsentScope>& scope = {});

/// Decrypts a shared item for `reader`, who must be subscribed to the items
/// and access streams. Throws Error(NotFound), Error(AccessDenied),
/// Error(CorruptEnvelope), Error(NotSubscribed).
Bytes read_shared(const NodeIdentity& reader, const ChainState& state, const StreamView& view,
                  std::string_view item_id);

/// Publisher of the envelope for `item_id`. Throws Error(NotFound).
Address shared_item_owner(const ChainState& state, std::string_view item_id);

}  // namespace permledger
