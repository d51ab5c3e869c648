#include "permledger/sharing.hpp"

#include <algorithm>

#include "permledger/codec.hpp"
#include "permledger/error.hpp"

namespace permledger {

namespace {

constexpr std::string_view kPubkeyTag = "pubkey-v1";

[[noreturn]] void corrupt(const std::string& what) { throw Error(ErrorCode::CorruptEnvelope, what); }

Bytes wrap_info(const std::string& item_id, const Address& recipient) {
  Writer w;
  w.str(kWrapScheme);
  w.str(item_id);
  w.str(recipient.str());
  return w.take();
}

crypto::SymmetricKey derive_kek(ByteView shared, const crypto::PublicKey& ephemeral,
                                const crypto::PublicKey& recipient_key, const Bytes& info) {
  Bytes salt(ephemeral.begin(), ephemeral.end());
  salt.insert(salt.end(), recipient_key.begin(), recipient_key.end());
  auto okm = crypto::hkdf_sha256(shared, salt, info, crypto::kKeySize);
  crypto::SymmetricKey kek{};
  std::copy(okm.begin(), okm.end(), kek.begin());
  return kek;
}

const StreamItem* find_envelope(const ChainState& state, std::string_view item_id) {
  const auto* items = state.find_stream(kItemsStream);
  if (items == nullptr) return nullptr;
  for (const auto& item : items->items) {
    if (item.key && *item.key == item_id) return &item;
  }
  return nullptr;
}

}  // namespace

Transaction announce_pubkey(Wallet& wallet, const ChainState& state) {
  Writer w;
  w.str(kPubkeyTag);
  w.raw(wallet.identity().public_key());
  w.raw(wallet.identity().wrap_public_key());
  return publish(wallet, state, std::string(kPubkeysStream), wallet.address().str(), w.take());
}

AnnouncedKey lookup_pubkey(const ChainState& state, const Address& address) {
  const auto* rec = state.find_stream(kPubkeysStream);
  if (rec != nullptr) {
    for (auto it = rec->items.rbegin(); it != rec->items.rend(); ++it) {
      if (it->publisher != address || it->key != address.str()) continue;
      try {
        Reader r(it->data);
        if (r.str() != kPubkeyTag) continue;
        AnnouncedKey k;
        k.signing = r.fixed<crypto::kKeySize>();
        k.wrapping = r.fixed<crypto::kKeySize>();
        r.expect_done();
        if (Address::from_public_key(k.signing) != address) continue;
        return k;
      } catch (const Error&) {
        continue;
      }
    }
  }
  throw Error(ErrorCode::NotFound, "no public key announced for " + address.str());
}

std::string EnvelopeItem::compute_item_id(ByteView ciphertext) { return to_hex(crypto::sha256(ciphertext)); }

Bytes EnvelopeItem::encode() const {
  Writer w;
  w.str(scheme_id);
  w.bytes(nonce);
  w.bytes(ciphertext);
  w.str(item_id);
  return w.take();
}

EnvelopeItem EnvelopeItem::decode(ByteView data) {
  try {
    Reader r(data);
    EnvelopeItem e;
    e.scheme_id = r.str();
    e.nonce = r.bytes();
    e.ciphertext = r.bytes();
    e.item_id = r.str();
    r.expect_done();
    return e;
  } catch (const Error& e) {
    corrupt(std::string("malformed envelope: ") + e.what());
  }
}

Bytes AccessEntry::encode() const {
  Writer w;
  w.str(item_id);
  w.str(recipient.str());
  w.str(scheme_id);
  w.bytes(wrapped_key);
  return w.take();
}

AccessEntry AccessEntry::decode(ByteView data) {
  try {
    Reader r(data);
    AccessEntry a;
    a.item_id = r.str();
    a.recipient = Address::parse_or_throw(r.str());
    a.scheme_id = r.str();
    a.wrapped_key = r.bytes();
    r.expect_done();
    return a;
  } catch (const Error& e) {
    corrupt(std::string("malformed access entry: ") + e.what());
  }
}

EnvelopeItem seal_item(const crypto::SymmetricKey& key, ByteView plaintext) {
  EnvelopeItem e;
  e.scheme_id = std::string(kSymmetricScheme);
  e.nonce = crypto::random_bytes(crypto::kGcmNonceSize);
  e.ciphertext = crypto::aead_seal(key, e.nonce, as_bytes(kSymmetricScheme), plaintext);
  e.item_id = EnvelopeItem::compute_item_id(e.ciphertext);
  return e;
}

Bytes open_item(const EnvelopeItem& item, const crypto::SymmetricKey& key) {
  if (item.scheme_id != kSymmetricScheme) corrupt("unsupported envelope scheme '" + item.scheme_id + "'");
  if (EnvelopeItem::compute_item_id(item.ciphertext) != item.item_id) corrupt("envelope digest mismatch");
  auto plain = crypto::aead_open(key, item.nonce, as_bytes(item.scheme_id), item.ciphertext);
  if (!plain) corrupt("envelope authentication failed");
  return std::move(*plain);
}

AccessEntry wrap_item_key(const crypto::SymmetricKey& key, const std::string& item_id, const Address& recipient,
                          const crypto::PublicKey& recipient_wrap_key) {
  auto ephemeral = NodeIdentity::generate();
  auto shared = ephemeral.agree(recipient_wrap_key);
  const auto& eph_pub = ephemeral.wrap_public_key();
  auto info = wrap_info(item_id, recipient);
  auto kek = derive_kek(shared, eph_pub, recipient_wrap_key, info);
  auto nonce = crypto::random_bytes(crypto::kGcmNonceSize);
  auto sealed = crypto::aead_seal(kek, nonce, info, key);

  AccessEntry entry;
  entry.item_id = item_id;
  entry.recipient = recipient;
  entry.scheme_id = std::string(kWrapScheme);
  entry.wrapped_key.assign(eph_pub.begin(), eph_pub.end());
  entry.wrapped_key.insert(entry.wrapped_key.end(), nonce.begin(), nonce.end());
  entry.wrapped_key.insert(entry.wrapped_key.end(), sealed.begin(), sealed.end());
  return entry;
}

crypto::SymmetricKey unwrap_item_key(const AccessEntry& entry, const NodeIdentity& recipient) {
  constexpr std::size_t kExpected = crypto::kKeySize + crypto::kGcmNonceSize + crypto::kKeySize + crypto::kGcmTagSize;
  if (entry.scheme_id != kWrapScheme) corrupt("unsupported wrap scheme '" + entry.scheme_id + "'");
  if (entry.wrapped_key.size() != kExpected) corrupt("wrapped key has wrong length");
  ByteView wrapped(entry.wrapped_key);
  auto eph_pub = to_array<crypto::kKeySize>(wrapped.first(crypto::kKeySize));
  auto nonce = wrapped.subspan(crypto::kKeySize, crypto::kGcmNonceSize);
  auto sealed = wrapped.subspan(crypto::kKeySize + crypto::kGcmNonceSize);
  auto shared = recipient.agree(eph_pub);
  auto info = wrap_info(entry.item_id, entry.recipient);
  auto kek = derive_kek(shared, eph_pub, recipient.wrap_public_key(), info);
  auto key = crypto::aead_open(kek, nonce, info, sealed);
  if (!key || key->size() != crypto::kKeySize) corrupt("wrapped key authentication failed");
  crypto::SymmetricKey out{};
  std::copy(key->begin(), key->end(), out.begin());
  return out;
}

ShareResult share_data(Wallet& owner, const ChainState& state, ByteView plaintext,
                       std::span<const Address> recipients, const std::optional<ConsentScope>& scope) {
  if (!check_permission(state.permissions(), owner.address(), Permission::Send)) {
    throw Error(ErrorCode::Denied, owner.address().str() + " lacks send");
  }
  ShareResult result;
  result.recipients.push_back(owner.address());
  for (const auto& r : recipients) {
    if (std::find(result.recipients.begin(), result.recipients.end(), r) == result.recipients.end()) {
      result.recipients.push_back(r);
    }
  }

  std::vector<crypto::PublicKey> wrap_keys;
  wrap_keys.push_back(owner.identity().wrap_public_key());
  for (std::size_t i = 1; i < result.recipients.size(); ++i) {
    const auto& r = result.recipients[i];
    try {
      wrap_keys.push_back(lookup_pubkey(state, r).wrapping);
    } catch (const Error&) {
      throw Error(ErrorCode::UnknownRecipientKey, "no announced public key for " + r.str());
    }
    if (scope) {
      auto gate = gate_share(state.consent(), scope->user_id, r.str(), scope->fields);
      if (!gate.ok) throw ConsentDeniedError(scope->user_id, r.str(), gate.missing);
    }
  }

  const auto key = crypto::random_key();
  auto envelope = seal_item(key, plaintext);
  result.item_id = envelope.item_id;
  result.transactions.push_back(
      publish(owner, state, std::string(kItemsStream), envelope.item_id, envelope.encode()));
  for (std::size_t i = 0; i < result.recipients.size(); ++i) {
    auto entry = wrap_item_key(key, envelope.item_id, result.recipients[i], wrap_keys[i]);
    result.transactions.push_back(
        publish(owner, state, std::string(kAccessStream), envelope.item_id, entry.encode()));
  }
  return result;
}

Address shared_item_owner(const ChainState& state, std::string_view item_id) {
  const auto* item = find_envelope(state, item_id);
  if (item == nullptr) throw Error(ErrorCode::NotFound, "no shared item " + std::string(item_id));
  return item->publisher;
}

Bytes read_shared(const NodeIdentity& reader, const ChainState& state, const StreamView& view,
                  std::string_view item_id) {
  // get_items enforces the subscription and receive gates.
  auto envelopes = view.get_items(state, kItemsStream, ItemFilter{std::string(item_id), std::nullopt});
  auto entries = view.get_items(state, kAccessStream, ItemFilter{std::string(item_id), std::nullopt});
  if (envelopes.empty()) throw Error(ErrorCode::NotFound, "no shared item " + std::string(item_id));
  const auto& envelope_item = envelopes.front();

  std::vector<AccessEntry> mine;
  for (const auto& e : entries) {
    if (e.publisher != envelope_item.publisher) continue;
    try {
      auto entry = AccessEntry::decode(e.data);
      if (entry.recipient == reader.address() && entry.item_id == item_id) mine.push_back(std::move(entry));
    } catch (const Error&) {
      continue;
    }
  }
  if (mine.empty()) {
    throw Error(ErrorCode::AccessDenied, reader.address().str() + " has no access entry for " + std::string(item_id));
  }
  auto envelope = EnvelopeItem::decode(envelope_item.data);
  if (envelope.item_id != item_id) corrupt("envelope filed under the wrong item id");
  std::optional<Error> last;
  for (auto it = mine.rbegin(); it != mine.rend(); ++it) {
    try {
      return open_item(envelope, unwrap_item_key(*it, reader));
    } catch (const Error& e) {
      last = e;
    }
  }
  throw *last;
}

}  // namespace permledger
