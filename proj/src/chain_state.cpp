#include "permledger/chain_state.hpp"

#include "permledger/codec.hpp"
#include "permledger/error.hpp"

namespace permledger {

ChainState::ChainState(ChainParams params) : params_(std::move(params)), permissions_(params_) {}

const StreamRecord* ChainState::find_stream(std::string_view name) const {
  auto it = streams_.find(name);
  return it == streams_.end() ? nullptr : &it->second;
}

std::uint64_t ChainState::next_nonce(const Address& a) const {
  auto it = nonces_.find(a);
  return it == nonces_.end() ? 0 : it->second;
}

std::vector<Address> ChainState::miners() const {
  std::vector<Address> out;
  const bool everyone = permissions_.defaults().contains(Permission::Mine);
  for (const auto& [addr, flags] : permissions_.entries()) {
    if (everyone || flags.contains(Permission::Mine)) out.push_back(addr);
  }
  return out;
}

void ChainState::apply(const Transaction& tx, ItemRef where, TimestampMs block_time, bool bootstrap) {
  if (!tx.id_matches()) throw Error(ErrorCode::InvalidTransaction, "transaction id does not match body");
  if (!tx.signature_valid()) throw Error(ErrorCode::BadSignature, "transaction signature invalid");
  if (tx.nonce < next_nonce(tx.signer)) {
    throw Error(ErrorCode::InvalidTransaction, "nonce " + std::to_string(tx.nonce) + " already used");
  }
  if (!bootstrap) {
    if (auto decision = authorize_tx(*this, tx); !decision) throw Error(decision.code, decision.reason);
  }

  // Everything below either throws before mutating or commits fully.
  std::visit(
      [&](const auto& payload) {
        using T = std::decay_t<decltype(payload)>;
        if constexpr (std::is_same_v<T, StreamCreatePayload>) {
          if (payload.name.empty()) throw Error(ErrorCode::InvalidTransaction, "empty stream name");
          if (find_stream(payload.name)) {
            throw Error(ErrorCode::DuplicateName, "stream '" + payload.name + "' already exists");
          }
          StreamRecord rec;
          rec.info = Stream{payload.name, tx.signer, payload.open, block_time};
          streams_.emplace(payload.name, std::move(rec));
        } else if constexpr (std::is_same_v<T, StreamPublishPayload>) {
          auto it = streams_.find(payload.stream);
          if (it == streams_.end()) {
            throw Error(ErrorCode::NoSuchStream, "no stream named '" + payload.stream + "'");
          }
          if (payload.stream == kConsentStream) consent_.apply(ConsentEvent::decode(payload.data));
          StreamItem item{payload.stream, tx.signer, payload.key, payload.data, block_time, true, where, tx.tx_id};
          it->second.items.push_back(std::move(item));
          it->second.publishers.insert(tx.signer);
        } else {
          const GrantPayload& change = payload;
          if (!(change.add & change.remove).empty()) {
            throw Error(ErrorCode::InvalidTransaction, "grant adds and removes the same flag");
          }
          if (!change.stream.empty()) {
            auto it = streams_.find(change.stream);
            if (it == streams_.end()) {
              throw Error(ErrorCode::NoSuchStream, "no stream named '" + change.stream + "'");
            }
            const PermissionSet write{Permission::Send};
            if (!((change.add | change.remove) - write).empty()) {
              throw Error(ErrorCode::InvalidTransaction, "stream grants may only carry write (send)");
            }
            if (change.add.contains(Permission::Send)) it->second.writers.insert(change.target);
            if (change.remove.contains(Permission::Send)) it->second.writers.erase(change.target);
          } else if (bootstrap) {
            permissions_.set(change.target, (permissions_.explicit_set(change.target) | change.add) - change.remove);
          } else {
            permissions_ = apply_grant(permissions_, tx.signer, change);
          }
        }
      },
      tx.payload);
  nonces_[tx.signer] = tx.nonce + 1;
}

Hash256 ChainState::state_hash() const {
  Writer w;
  w.str("state-v1");
  w.boolean(best_height_.has_value());
  w.u64(best_height_.value_or(0));
  w.u32(static_cast<std::uint32_t>(permissions_.entries().size()));
  for (const auto& [addr, flags] : permissions_.entries()) {
    w.str(addr.str());
    w.u8(flags.bits());
  }
  w.u32(static_cast<std::uint32_t>(nonces_.size()));
  for (const auto& [addr, nonce] : nonces_) {
    w.str(addr.str());
    w.u64(nonce);
  }
  w.u32(static_cast<std::uint32_t>(streams_.size()));
  for (const auto& [name, rec] : streams_) {
    w.str(name);
    w.str(rec.info.creator.str());
    w.boolean(rec.info.open);
    w.u64(rec.info.created_at);
    w.u32(static_cast<std::uint32_t>(rec.writers.size()));
    for (const auto& a : rec.writers) w.str(a.str());
    w.u32(static_cast<std::uint32_t>(rec.items.size()));
    for (const auto& item : rec.items) {
      w.str(item.publisher.str());
      w.boolean(item.key.has_value());
      w.str(item.key.value_or(""));
      w.raw(crypto::sha256(item.data));
      w.u64(item.published_at);
      w.u64(item.ref.height);
      w.u32(item.ref.tx_index);
      w.raw(item.tx_id);
    }
  }
  w.u32(static_cast<std::uint32_t>(consent_.records().size()));
  for (const auto& [key, rec] : consent_.records()) {
    w.str(key.first);
    w.str(key.second);
    w.u8(static_cast<std::uint8_t>(rec.state));
    w.u64(rec.version);
    w.u64(rec.updated_at);
    w.u32(static_cast<std::uint32_t>(rec.allowed_fields.size()));
    for (const auto& f : rec.allowed_fields) w.str(f);
  }
  return crypto::sha256(w.data());
}

std::size_t ChainState::accounted_bytes() const {
  std::size_t total = 0;
  for (const auto& [addr, flags] : permissions_.entries()) total += sizeof(Address) + addr.str().size() + sizeof(flags);
  for (const auto& [addr, nonce] : nonces_) total += sizeof(Address) + addr.str().size() + sizeof(nonce);
  for (const auto& [name, rec] : streams_) {
    total += sizeof(StreamRecord) + name.size() * 2 + rec.info.creator.str().size();
    for (const auto& a : rec.writers) total += sizeof(Address) + a.str().size();
    for (const auto& a : rec.publishers) total += sizeof(Address) + a.str().size();
    for (const auto& item : rec.items) {
      total += sizeof(StreamItem) + item.stream.size() + item.publisher.str().size() +
               item.key.value_or("").size() + item.data.size();
    }
  }
  for (const auto& [key, rec] : consent_.records()) {
    total += sizeof(ConsentRecord) + key.first.size() * 2 + key.second.size() * 2;
    for (const auto& f : rec.allowed_fields) total += f.size();
  }
  total += consent_.event_count() * sizeof(ConsentEvent);
  return total;
}

}  // namespace permledger
