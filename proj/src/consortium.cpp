#include "permledger/consortium.hpp"

#include <algorithm>

#include "permledger/error.hpp"

namespace permledger {

Consortium Consortium::create(const ChainParams& params, std::string founder_name, NodeIdentity founder,
                              TimestampMs now) {
  Consortium c(Chain::create(params, founder, now));
  auto& m = c.add_member(std::move(founder_name), std::move(founder));
  std::vector<Transaction> txs;
  auto& wallet = c.synced_wallet(m.name);
  for (auto name : {kPubkeysStream, kItemsStream, kAccessStream, kConsentStream}) {
    txs.push_back(wallet.sign(StreamCreatePayload{std::string(name), true}));
  }
  c.commit(std::move(txs), now);
  return c;
}

Member& Consortium::add_member(std::string name, NodeIdentity identity) {
  if (name.empty()) throw Error(ErrorCode::Usage, "identity name must not be empty");
  for (const auto& m : members_) {
    if (m.name == name) throw Error(ErrorCode::DuplicateName, "identity '" + name + "' already exists");
  }
  members_.emplace_back(std::move(name), std::move(identity));
  return members_.back();
}

Member& Consortium::member(std::string_view name) {
  for (auto& m : members_) {
    if (m.name == name) return m;
  }
  throw Error(ErrorCode::NotFound, "no local identity named '" + std::string(name) + "'");
}

const Member& Consortium::member(std::string_view name) const {
  return const_cast<Consortium*>(this)->member(name);
}

Address Consortium::resolve(std::string_view name_or_address) const {
  for (const auto& m : members_) {
    if (m.name == name_or_address) return m.address();
  }
  if (auto a = Address::parse(name_or_address)) return *a;
  throw Error(ErrorCode::NotFound, "'" + std::string(name_or_address) + "' is neither a local identity nor an address");
}

Wallet& Consortium::synced_wallet(std::string_view name) {
  auto& m = member(name);
  m.wallet.sync_nonce(state().next_nonce(m.address()));
  return m.wallet;
}

Block Consortium::commit(std::vector<Transaction> txs, TimestampMs now) {
  const auto next = chain_.height() + 1;
  auto scheduled = chain_.scheduled_miner(next);
  if (!scheduled) throw Error(ErrorCode::NotPermittedMiner, "no address holds mine");
  auto it = std::find_if(members_.begin(), members_.end(), [&](const Member& m) { return m.address() == *scheduled; });
  if (it == members_.end()) {
    throw Error(ErrorCode::NotPermittedMiner, "scheduled miner " + scheduled->str() + " is not a local identity");
  }
  return chain_.append_block(std::move(txs), it->wallet.identity(), now);
}

Block Consortium::grant(std::string_view by, const Address& target, PermissionSet flags, TimestampMs now) {
  auto tx = synced_wallet(by).sign(GrantPayload{target, flags, {}, {}});
  return commit({tx}, now);
}

Block Consortium::revoke(std::string_view by, const Address& target, PermissionSet flags, TimestampMs now) {
  auto tx = synced_wallet(by).sign(RevokePayload{GrantPayload{target, {}, flags, {}}});
  return commit({tx}, now);
}

Block Consortium::create_stream(std::string_view by, std::string name, bool open, TimestampMs now) {
  auto tx = permledger::create_stream(synced_wallet(by), state(), std::move(name), open);
  return commit({tx}, now);
}

Block Consortium::publish(std::string_view by, std::string stream, std::optional<std::string> key, Bytes data,
                          TimestampMs now) {
  auto tx = permledger::publish(synced_wallet(by), state(), std::move(stream), std::move(key), std::move(data));
  return commit({tx}, now);
}

Block Consortium::announce_key(std::string_view by, TimestampMs now) {
  auto tx = announce_pubkey(synced_wallet(by), state());
  return commit({tx}, now);
}

Block Consortium::consent(std::string_view relay, std::string_view user, ConsentEventKind kind, std::string grantee,
                          FieldSet fields, TimestampMs now) {
  const auto& u = member(user);
  const auto user_id = u.address().str();
  TimestampMs issued_at = std::max(now, chain_.tip_timestamp());
  if (const auto* rec = state().consent().find(user_id, grantee)) issued_at = std::max(issued_at, rec->updated_at);
  auto event = ConsentEvent::make(u.wallet.identity(), kind, grantee, std::move(fields),
                                  state().consent().next_sequence(user_id, grantee), issued_at);
  // Surface FSM errors before anything is signed into a block.
  transition(state().consent().find(user_id, event.grantee)
                 ? std::optional<ConsentRecord>(*state().consent().find(user_id, event.grantee))
                 : std::nullopt,
             event);
  auto tx = permledger::publish(synced_wallet(relay), state(), std::string(kConsentStream), user_id, event.encode());
  return commit({tx}, issued_at);
}

ShareResult Consortium::share_profile(std::string_view by, const std::string& user_id,
                                      std::span<const Address> recipients, TimestampMs now) {
  auto& m = member(by);
  auto result = publish_profile(m.repo, synced_wallet(by), state(), user_id, recipients);
  commit(result.transactions, now);
  return result;
}

ShareResult Consortium::share_bytes(std::string_view by, ByteView plaintext, std::span<const Address> recipients,
                                    TimestampMs now) {
  auto result = share_data(synced_wallet(by), state(), plaintext, recipients);
  commit(result.transactions, now);
  return result;
}

const UserProfile& Consortium::import_profile(std::string_view by, std::string_view item_id) {
  auto& m = member(by);
  return permledger::import_profile(m.repo, m.wallet.identity(), state(), m.view, item_id);
}

}  // namespace permledger
