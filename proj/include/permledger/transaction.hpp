#pragma once

#include <optional>
#include <string>
#include <variant>

#include "permledger/bytes.hpp"
#include "permledger/crypto.hpp"
#include "permledger/identity.hpp"
#include "permledger/permissions.hpp"

namespace permledger {

struct RevokePayload : GrantPayload {};

struct StreamCreatePayload {
  std::string name;
  bool open = false;

  bool operator==(const StreamCreatePayload&) const = default;
};

struct StreamPublishPayload {
  std::string stream;
  std::optional<std::string> key;
  Bytes data;

  bool operator==(const StreamPublishPayload&) const = default;
};

using Payload = std::variant<GrantPayload, RevokePayload, StreamCreatePayload, StreamPublishPayload>;

enum class PayloadKind : std::uint8_t { Grant = 1, Revoke = 2, StreamCreate = 3, StreamPublish = 4 };

const char* to_string(PayloadKind kind);

struct Transaction {
  Hash256 tx_id{};
  Address signer;
  crypto::PublicKey signer_key{};
  std::uint64_t nonce = 0;
  Payload payload;
  crypto::Signature signature{};

  static Transaction sign(const NodeIdentity& signer, std::uint64_t nonce, Payload payload);

  PayloadKind kind() const;
  /// Canonical serialization of (signer, key, nonce, payload); tx_id is its digest.
  Bytes body() const;
  Hash256 compute_id() const;
  bool id_matches() const { return compute_id() == tx_id; }
  bool signature_valid() const;

  Bytes encode() const;
  /// Throws Error(Decode); the whole input must be consumed.
  static Transaction decode(ByteView data);

  bool operator==(const Transaction&) const = default;
};

/// A node's signing identity plus its nonce counter.
class Wallet {
 public:
  explicit Wallet(NodeIdentity identity, std::uint64_t next_nonce = 0)
      : identity_(std::move(identity)), next_nonce_(next_nonce) {}

  const NodeIdentity& identity() const { return identity_; }
  const Address& address() const { return identity_.address(); }
  std::uint64_t next_nonce() const { return next_nonce_; }

  /// Never moves the counter backwards.
  void sync_nonce(std::uint64_t chain_min) { next_nonce_ = std::max(next_nonce_, chain_min); }
  Transaction sign(Payload payload) { return Transaction::sign(identity_, next_nonce_++, std::move(payload)); }
  void replace_identity(NodeIdentity identity) { identity_ = std::move(identity); }

 private:
  NodeIdentity identity_;
  std::uint64_t next_nonce_;
};

}  // namespace permledger
