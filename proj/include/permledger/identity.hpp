#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

#include "permledger/bytes.hpp"
#include "permledger/crypto.hpp"

namespace permledger {

/// Checksummed base58 encoding of a 160-bit digest of a signing public key.
class Address {
 public:
  Address() = default;

  static Address from_public_key(const crypto::PublicKey& key);
  /// Returns nullopt when the text is not base58 or the checksum does not match.
  static std::optional<Address> parse(std::string_view text);
  /// Like parse, but throws Error(Decode).
  static Address parse_or_throw(std::string_view text);

  const std::string& str() const { return text_; }
  bool empty() const { return text_.empty(); }

  auto operator<=>(const Address&) const = default;

 private:
  explicit Address(std::string text) : text_(std::move(text)) {}

  std::string text_;
};

/// Signing keypair + key-wrapping keypair + derived address. The wrapping key
/// can be rotated without changing the address.
class NodeIdentity {
 public:
  /// Deterministic when `seed` is given; random otherwise.
  static NodeIdentity generate(std::optional<ByteView> seed = std::nullopt);
  static NodeIdentity from_master_seed(const crypto::Seed& master, std::uint32_t wrap_generation = 0);

  const Address& address() const { return address_; }
  const crypto::PublicKey& public_key() const { return signing_.public_key(); }
  const crypto::PublicKey& wrap_public_key() const { return wrapping_.public_key(); }
  const crypto::Seed& master_seed() const { return master_; }
  std::uint32_t wrap_generation() const { return wrap_generation_; }

  crypto::Signature sign(ByteView message) const { return signing_.sign(message); }
  std::array<std::uint8_t, crypto::kKeySize> agree(const crypto::PublicKey& peer) const {
    return wrapping_.agree(peer);
  }

  /// Same signing key and address, next-generation wrapping key.
  NodeIdentity with_rotated_wrap_key() const;

 private:
  NodeIdentity(crypto::Seed master, std::uint32_t generation);

  crypto::Seed master_{};
  std::uint32_t wrap_generation_ = 0;
  crypto::SigningKey signing_;
  crypto::AgreementKey wrapping_;
  Address address_;
};

/// Signature check that also binds the key to the claimed address.
bool verify_signed_by(const Address& address, const crypto::PublicKey& key, ByteView message,
                      ByteView signature);

}  // namespace permledger
