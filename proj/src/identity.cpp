#include "permledger/identity.hpp"

#include <algorithm>
#include <cstring>

#include "permledger/codec.hpp"
#include "permledger/error.hpp"

namespace permledger {

namespace {

constexpr std::uint8_t kAddressVersion = 0x00;
constexpr std::size_t kDigestSize = 20;
constexpr std::size_t kChecksumSize = 4;

std::array<std::uint8_t, kChecksumSize> checksum(ByteView payload) {
  auto once = crypto::sha256(payload);
  auto twice = crypto::sha256(once);
  std::array<std::uint8_t, kChecksumSize> out{};
  std::copy_n(twice.begin(), kChecksumSize, out.begin());
  return out;
}

crypto::Seed derive_seed(std::string_view label, std::uint32_t generation, const crypto::Seed& master) {
  Writer w;
  w.str(label);
  w.u32(generation);
  w.raw(master);
  return crypto::sha256(w.data());
}

}  // namespace

Address Address::from_public_key(const crypto::PublicKey& key) {
  auto digest = crypto::sha256(crypto::sha256(key));
  Bytes payload;
  payload.push_back(kAddressVersion);
  payload.insert(payload.end(), digest.begin(), digest.begin() + kDigestSize);
  auto sum = checksum(payload);
  payload.insert(payload.end(), sum.begin(), sum.end());
  return Address(crypto::base58_encode(payload));
}

std::optional<Address> Address::parse(std::string_view text) {
  auto decoded = crypto::base58_decode(text);
  if (!decoded || decoded->size() != 1 + kDigestSize + kChecksumSize) return std::nullopt;
  if ((*decoded)[0] != kAddressVersion) return std::nullopt;
  ByteView payload(decoded->data(), 1 + kDigestSize);
  auto sum = checksum(payload);
  if (!std::equal(sum.begin(), sum.end(), decoded->begin() + 1 + kDigestSize)) return std::nullopt;
  // Reject non-canonical spellings so each address has exactly one text form.
  if (crypto::base58_encode(*decoded) != text) return std::nullopt;
  return Address(std::string(text));
}

Address Address::parse_or_throw(std::string_view text) {
  auto a = parse(text);
  if (!a) throw Error(ErrorCode::Decode, "invalid address '" + std::string(text) + "'");
  return *a;
}

NodeIdentity::NodeIdentity(crypto::Seed master, std::uint32_t generation)
    : master_(master),
      wrap_generation_(generation),
      signing_(crypto::SigningKey::from_seed(derive_seed("permledger/sign", 0, master))),
      wrapping_(crypto::AgreementKey::from_seed(derive_seed("permledger/wrap", generation, master))),
      address_(Address::from_public_key(signing_.public_key())) {}

NodeIdentity NodeIdentity::generate(std::optional<ByteView> seed) {
  crypto::Seed master{};
  if (seed) {
    master = crypto::sha256(*seed);
  } else {
    auto r = crypto::random_bytes(master.size());
    std::copy(r.begin(), r.end(), master.begin());
  }
  return NodeIdentity(master, 0);
}

NodeIdentity NodeIdentity::from_master_seed(const crypto::Seed& master, std::uint32_t wrap_generation) {
  return NodeIdentity(master, wrap_generation);
}

NodeIdentity NodeIdentity::with_rotated_wrap_key() const {
  return NodeIdentity(master_, wrap_generation_ + 1);
}

bool verify_signed_by(const Address& address, const crypto::PublicKey& key, ByteView message,
                      ByteView signature) {
  return Address::from_public_key(key) == address && crypto::verify_signature(key, message, signature);
}

}  // namespace permledger
