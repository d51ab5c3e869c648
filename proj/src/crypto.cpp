#include "permledger/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/kdf.h>
#include <openssl/params.h>
#include <openssl/core_names.h>
#include <openssl/rand.h>

#include <algorithm>
#include <cstring>
#include <mutex>
#include <set>

#include "permledger/error.hpp"

namespace permledger::crypto {

namespace {

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* p) const noexcept { EVP_MD_CTX_free(p); }
};
struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* p) const noexcept { EVP_CIPHER_CTX_free(p); }
};
struct PkeyCtxDeleter {
  void operator()(EVP_PKEY_CTX* p) const noexcept { EVP_PKEY_CTX_free(p); }
};
struct KdfDeleter {
  void operator()(EVP_KDF* p) const noexcept { EVP_KDF_free(p); }
};
struct KdfCtxDeleter {
  void operator()(EVP_KDF_CTX* p) const noexcept { EVP_KDF_CTX_free(p); }
};

[[noreturn]] void fail(const char* what) { throw std::runtime_error(std::string("openssl: ") + what); }

EVP_PKEY* as_pkey(const std::shared_ptr<void>& p) { return static_cast<EVP_PKEY*>(p.get()); }

PublicKey raw_public(EVP_PKEY* key) {
  PublicKey pub{};
  std::size_t len = pub.size();
  if (EVP_PKEY_get_raw_public_key(key, pub.data(), &len) != 1 || len != pub.size()) {
    fail("get_raw_public_key");
  }
  return pub;
}

}  // namespace

void PkeyDeleter::operator()(void* p) const noexcept { EVP_PKEY_free(static_cast<EVP_PKEY*>(p)); }

Hash256 sha256(ByteView data) {
  Hash256 out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1) {
    fail("sha256");
  }
  return out;
}

Hash256 sha256(ByteView a, ByteView b) {
  std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
  Hash256 out{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), a.data(), a.size()) != 1 ||
      EVP_DigestUpdate(ctx.get(), b.data(), b.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1) {
    fail("sha256");
  }
  return out;
}

Bytes hkdf_sha256(ByteView ikm, ByteView salt, ByteView info, std::size_t length) {
  std::unique_ptr<EVP_KDF, KdfDeleter> kdf(EVP_KDF_fetch(nullptr, "HKDF", nullptr));
  if (!kdf) fail("HKDF fetch");
  std::unique_ptr<EVP_KDF_CTX, KdfCtxDeleter> ctx(EVP_KDF_CTX_new(kdf.get()));
  if (!ctx) fail("HKDF ctx");
  char digest[] = "SHA256";
  OSSL_PARAM params[] = {
      OSSL_PARAM_construct_utf8_string(OSSL_KDF_PARAM_DIGEST, digest, 0),
      OSSL_PARAM_construct_octet_string(OSSL_KDF_PARAM_KEY, const_cast<std::uint8_t*>(ikm.data()),
                                        ikm.size()),
      OSSL_PARAM_construct_octet_string(OSSL_KDF_PARAM_SALT, const_cast<std::uint8_t*>(salt.data()),
                                        salt.size()),
      OSSL_PARAM_construct_octet_string(OSSL_KDF_PARAM_INFO, const_cast<std::uint8_t*>(info.data()),
                                        info.size()),
      OSSL_PARAM_construct_end(),
  };
  Bytes out(length);
  if (EVP_KDF_derive(ctx.get(), out.data(), out.size(), params) != 1) fail("HKDF derive");
  return out;
}

Bytes random_bytes(std::size_t n) {
  Bytes out(n);
  if (n > 0 && RAND_bytes(out.data(), static_cast<int>(n)) != 1) fail("RAND_bytes");
  return out;
}

SymmetricKey random_key() {
  SymmetricKey key{};
  if (RAND_bytes(key.data(), static_cast<int>(key.size())) != 1) fail("RAND_bytes");
  return key;
}

SigningKey SigningKey::from_seed(const Seed& seed) {
  EVP_PKEY* raw = EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed.data(), seed.size());
  if (!raw) fail("ed25519 key");
  PkeyPtr key(raw);
  auto pub = raw_public(raw);
  return SigningKey(std::move(key), pub);
}

Signature SigningKey::sign(ByteView message) const {
  std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
  Signature sig{};
  std::size_t len = sig.size();
  if (!ctx || EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, as_pkey(key_)) != 1 ||
      EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(), message.size()) != 1 ||
      len != sig.size()) {
    fail("ed25519 sign");
  }
  return sig;
}

namespace {

/// Digests of (key, signature, message) triples already verified as valid.
class VerifiedCache {
 public:
  static constexpr std::size_t kCapacity = 1 << 16;

  bool contains(const Hash256& h) {
    std::lock_guard lock(mu_);
    return seen_.contains(h);
  }
  void insert(const Hash256& h) {
    std::lock_guard lock(mu_);
    if (seen_.size() >= kCapacity) seen_.clear();
    seen_.insert(h);
  }

 private:
  std::mutex mu_;
  std::set<Hash256> seen_;
};

VerifiedCache& verified_cache() {
  static VerifiedCache cache;
  return cache;
}

bool verify_uncached(const PublicKey& key, ByteView message, ByteView signature) {
  PkeyPtr pkey(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, key.data(), key.size()));
  if (!pkey) return false;
  std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
  if (!ctx ||
      EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, static_cast<EVP_PKEY*>(pkey.get())) != 1) {
    return false;
  }
  return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), message.data(),
                          message.size()) == 1;
}

}  // namespace

bool verify_signature(const PublicKey& key, ByteView message, ByteView signature) {
  if (signature.size() != kSignatureSize) return false;
  Bytes prefix(key.begin(), key.end());
  prefix.insert(prefix.end(), signature.begin(), signature.end());
  const auto digest = sha256(prefix, message);
  if (verified_cache().contains(digest)) return true;
  if (!verify_uncached(key, message, signature)) return false;
  verified_cache().insert(digest);
  return true;
}

AgreementKey AgreementKey::from_seed(const Seed& seed) {
  EVP_PKEY* raw = EVP_PKEY_new_raw_private_key(EVP_PKEY_X25519, nullptr, seed.data(), seed.size());
  if (!raw) fail("x25519 key");
  PkeyPtr key(raw);
  auto pub = raw_public(raw);
  return AgreementKey(std::move(key), pub);
}

std::array<std::uint8_t, kKeySize> AgreementKey::agree(const PublicKey& peer) const {
  PkeyPtr peer_key(EVP_PKEY_new_raw_public_key(EVP_PKEY_X25519, nullptr, peer.data(), peer.size()));
  if (!peer_key) throw Error(ErrorCode::CorruptEnvelope, "invalid X25519 peer key");
  std::unique_ptr<EVP_PKEY_CTX, PkeyCtxDeleter> ctx(EVP_PKEY_CTX_new(as_pkey(key_), nullptr));
  std::array<std::uint8_t, kKeySize> secret{};
  std::size_t len = secret.size();
  if (!ctx || EVP_PKEY_derive_init(ctx.get()) != 1 ||
      EVP_PKEY_derive_set_peer(ctx.get(), static_cast<EVP_PKEY*>(peer_key.get())) != 1 ||
      EVP_PKEY_derive(ctx.get(), secret.data(), &len) != 1 || len != secret.size()) {
    throw Error(ErrorCode::CorruptEnvelope, "X25519 agreement failed");
  }
  return secret;
}

Bytes aead_seal(const SymmetricKey& key, ByteView nonce, ByteView aad, ByteView plaintext) {
  if (nonce.size() != kGcmNonceSize) throw std::invalid_argument("GCM nonce must be 12 bytes");
  std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter> ctx(EVP_CIPHER_CTX_new());
  Bytes out(plaintext.size() + kGcmTagSize);
  int len = 0;
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), nonce.data()) != 1) {
    fail("gcm init");
  }
  if (!aad.empty() &&
      EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1) {
    fail("gcm aad");
  }
  if (!plaintext.empty() && EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(),
                                              static_cast<int>(plaintext.size())) != 1) {
    fail("gcm update");
  }
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + plaintext.size(), &len) != 1) fail("gcm final");
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kGcmTagSize,
                          out.data() + plaintext.size()) != 1) {
    fail("gcm tag");
  }
  return out;
}

std::optional<Bytes> aead_open(const SymmetricKey& key, ByteView nonce, ByteView aad, ByteView sealed) {
  if (nonce.size() != kGcmNonceSize || sealed.size() < kGcmTagSize) return std::nullopt;
  const std::size_t body = sealed.size() - kGcmTagSize;
  std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter> ctx(EVP_CIPHER_CTX_new());
  Bytes out(body);
  int len = 0;
  if (!ctx || EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), nonce.data()) != 1) {
    fail("gcm init");
  }
  if (!aad.empty() &&
      EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1) {
    return std::nullopt;
  }
  if (body > 0 &&
      EVP_DecryptUpdate(ctx.get(), out.data(), &len, sealed.data(), static_cast<int>(body)) != 1) {
    return std::nullopt;
  }
  Bytes tag(sealed.begin() + static_cast<std::ptrdiff_t>(body), sealed.end());
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kGcmTagSize, tag.data()) != 1) {
    return std::nullopt;
  }
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + body, &len) != 1) return std::nullopt;
  return out;
}

namespace {
constexpr char kBase58[] = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";
}

std::string base58_encode(ByteView data) {
  std::size_t zeros = 0;
  while (zeros < data.size() && data[zeros] == 0) ++zeros;
  std::vector<std::uint8_t> digits;  // little-endian base-58
  for (std::size_t i = zeros; i < data.size(); ++i) {
    int carry = data[i];
    for (auto& d : digits) {
      carry += d * 256;
      d = static_cast<std::uint8_t>(carry % 58);
      carry /= 58;
    }
    while (carry > 0) {
      digits.push_back(static_cast<std::uint8_t>(carry % 58));
      carry /= 58;
    }
  }
  std::string out(zeros, '1');
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) out.push_back(kBase58[*it]);
  return out;
}

std::optional<Bytes> base58_decode(std::string_view text) {
  std::size_t zeros = 0;
  while (zeros < text.size() && text[zeros] == '1') ++zeros;
  std::vector<std::uint8_t> bytes;  // little-endian base-256
  for (std::size_t i = zeros; i < text.size(); ++i) {
    const char* p = std::strchr(kBase58, text[i]);
    if (text[i] == '\0' || p == nullptr) return std::nullopt;
    int carry = static_cast<int>(p - kBase58);
    for (auto& b : bytes) {
      carry += b * 58;
      b = static_cast<std::uint8_t>(carry & 0xff);
      carry >>= 8;
    }
    while (carry > 0) {
      bytes.push_back(static_cast<std::uint8_t>(carry & 0xff));
      carry >>= 8;
    }
  }
  Bytes out(zeros, 0);
  out.insert(out.end(), bytes.rbegin(), bytes.rend());
  return out;
}

}  // namespace permledger::crypto
