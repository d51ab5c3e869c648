#include "permledger/transaction.hpp"

#include "permledger/codec.hpp"
#include "permledger/error.hpp"

namespace permledger {

namespace {

void encode_grant(Writer& w, const GrantPayload& g) {
  w.str(g.target.str());
  w.u8(g.add.bits());
  w.u8(g.remove.bits());
  w.str(g.stream);
}

GrantPayload decode_grant(Reader& r) {
  GrantPayload g;
  g.target = Address::parse_or_throw(r.str());
  g.add = PermissionSet::from_bits(r.u8());
  g.remove = PermissionSet::from_bits(r.u8());
  g.stream = r.str();
  return g;
}

}  // namespace

const char* to_string(PayloadKind kind) {
  switch (kind) {
    case PayloadKind::Grant: return "grant";
    case PayloadKind::Revoke: return "revoke";
    case PayloadKind::StreamCreate: return "create-stream";
    case PayloadKind::StreamPublish: return "publish";
  }
  return "?";
}

PayloadKind Transaction::kind() const {
  return static_cast<PayloadKind>(payload.index() + 1);
}

Bytes Transaction::body() const {
  Writer w;
  w.str(signer.str());
  w.raw(signer_key);
  w.u64(nonce);
  w.u8(static_cast<std::uint8_t>(kind()));
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, StreamCreatePayload>) {
          w.str(p.name);
          w.boolean(p.open);
        } else if constexpr (std::is_same_v<T, StreamPublishPayload>) {
          w.str(p.stream);
          w.boolean(p.key.has_value());
          if (p.key) w.str(*p.key);
          w.bytes(p.data);
        } else {
          encode_grant(w, p);
        }
      },
      payload);
  return w.take();
}

Hash256 Transaction::compute_id() const { return crypto::sha256(body()); }

bool Transaction::signature_valid() const {
  return verify_signed_by(signer, signer_key, tx_id, signature);
}

Transaction Transaction::sign(const NodeIdentity& signer, std::uint64_t nonce, Payload payload) {
  Transaction tx;
  tx.signer = signer.address();
  tx.signer_key = signer.public_key();
  tx.nonce = nonce;
  tx.payload = std::move(payload);
  tx.tx_id = tx.compute_id();
  tx.signature = signer.sign(tx.tx_id);
  return tx;
}

Bytes Transaction::encode() const {
  Writer w;
  w.raw(tx_id);
  w.raw(body());
  w.raw(signature);
  return w.take();
}

Transaction Transaction::decode(ByteView data) {
  Reader r(data);
  Transaction tx;
  tx.tx_id = r.fixed<32>();
  tx.signer = Address::parse_or_throw(r.str());
  tx.signer_key = r.fixed<crypto::kKeySize>();
  tx.nonce = r.u64();
  auto kind = r.u8();
  switch (kind) {
    case static_cast<std::uint8_t>(PayloadKind::Grant):
      tx.payload = decode_grant(r);
      break;
    case static_cast<std::uint8_t>(PayloadKind::Revoke):
      tx.payload = RevokePayload{decode_grant(r)};
      break;
    case static_cast<std::uint8_t>(PayloadKind::StreamCreate): {
      StreamCreatePayload p;
      p.name = r.str();
      p.open = r.boolean();
      tx.payload = std::move(p);
      break;
    }
    case static_cast<std::uint8_t>(PayloadKind::StreamPublish): {
      StreamPublishPayload p;
      p.stream = r.str();
      if (r.boolean()) p.key = r.str();
      p.data = r.bytes();
      tx.payload = std::move(p);
      break;
    }
    default:
      throw Error(ErrorCode::Decode, "unknown payload kind " + std::to_string(kind));
  }
  tx.signature = r.fixed<crypto::kSignatureSize>();
  r.expect_done();
  return tx;
}

}  // namespace permledger
