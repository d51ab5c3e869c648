#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>

#include "permledger/bytes.hpp"

namespace permledger::crypto {

constexpr std::size_t kKeySize = 32;
constexpr std::size_t kSignatureSize = 64;
constexpr std::size_t kGcmNonceSize = 12;
constexpr std::size_t kGcmTagSize = 16;

using PublicKey = std::array<std::uint8_t, kKeySize>;
using Seed = std::array<std::uint8_t, kKeySize>;
using Signature = std::array<std::uint8_t, kSignatureSize>;
using SymmetricKey = std::array<std::uint8_t, kKeySize>;

Hash256 sha256(ByteView data);
Hash256 sha256(ByteView a, ByteView b);

Bytes hkdf_sha256(ByteView ikm, ByteView salt, ByteView info, std::size_t length);

/// Cryptographically secure random bytes from the OpenSSL DRBG.
Bytes random_bytes(std::size_t n);
SymmetricKey random_key();

struct PkeyDeleter {
  void operator()(void* p) const noexcept;
};
using PkeyPtr = std::unique_ptr<void, PkeyDeleter>;

/// Ed25519 keypair. Deterministic from its 32-byte seed.
class SigningKey {
 public:
  static SigningKey from_seed(const Seed& seed);

  const PublicKey& public_key() const { return public_; }
  Signature sign(ByteView message) const;

 private:
  SigningKey(PkeyPtr key, PublicKey pub) : key_(std::move(key)), public_(pub) {}

  std::shared_ptr<void> key_;
  PublicKey public_{};
};

bool verify_signature(const PublicKey& key, ByteView message, ByteView signature);

/// X25519 keypair used for wrapping symmetric keys to a recipient.
class AgreementKey {
 public:
  static AgreementKey from_seed(const Seed& seed);

  const PublicKey& public_key() const { return public_; }
  /// Raw X25519 shared secret; throws Error(CorruptEnvelope) for invalid peers.
  std::array<std::uint8_t, kKeySize> agree(const PublicKey& peer) const;

 private:
  AgreementKey(PkeyPtr key, PublicKey pub) : key_(std::move(key)), public_(pub) {}

  std::shared_ptr<void> key_;
  PublicKey public_{};
};

/// AES-256-GCM. Output of seal is ciphertext || 16-byte tag.
Bytes aead_seal(const SymmetricKey& key, ByteView nonce, ByteView aad, ByteView plaintext);
/// Returns nullopt when authentication fails.
std::optional<Bytes> aead_open(const SymmetricKey& key, ByteView nonce, ByteView aad,
                               ByteView sealed);

std::string base58_encode(ByteView data);
std::optional<Bytes> base58_decode(std::string_view text);

}  // namespace permledger::crypto
