#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "permledger/chain.hpp"
#include "permledger/enterprise.hpp"
#include "permledger/sharing.hpp"
#include "permledger/streams.hpp"

namespace permledger {

/// One local identity: an enterprise node or an end user's key.
struct Member {
  std::string name;
  Wallet wallet;
  StreamView view;
  Repository repo;
  bool stopped = false;

  Member(std::string n, NodeIdentity id)
      : name(std::move(n)), wallet(std::move(id)), view(wallet.address()) {}

  const Address& address() const { return wallet.address(); }
};

/// Chain plus every local identity that takes part in it. Each operation
/// signs its transactions and immediately seals them into one block produced
/// by whichever local identity is the scheduled miner.
class Consortium {
 public:
  /// Genesis, then a block creating the pubkeys, items, access and consent
  /// streams.
  static Consortium create(const ChainParams& params, std::string founder_name, NodeIdentity founder,
                           TimestampMs now);
  /// Wraps an existing chain; members are added afterwards.
  explicit Consortium(Chain chain) : chain_(std::move(chain)) {}

  const Chain& chain() const { return chain_; }
  const ChainState& state() const { return chain_.state(); }

  Member& add_member(std::string name, NodeIdentity identity);
  /// Throws Error(NotFound).
  Member& member(std::string_view name);
  const Member& member(std::string_view name) const;
  const std::vector<Member>& members() const { return members_; }
  /// Member name, or a literal address. Throws Error(NotFound).
  Address resolve(std::string_view name_or_address) const;

  /// Seals `txs` into the next block. Throws Error(NotPermittedMiner) when
  /// the scheduled miner is not a local identity, plus append_block errors.
  Block commit(std::vector<Transaction> txs, TimestampMs now);

  Block grant(std::string_view by, const Address& target, PermissionSet flags, TimestampMs now);
  Block revoke(std::string_view by, const Address& target, PermissionSet flags, TimestampMs now);
  Block create_stream(std::string_view by, std::string name, bool open, TimestampMs now);
  Block publish(std::string_view by, std::string stream, std::optional<std::string> key, Bytes data,
                TimestampMs now);
  Block announce_key(std::string_view by, TimestampMs now);
  /// Signs a consent event with the user's key and publishes it through `relay`.
  Block consent(std::string_view relay, std::string_view user, ConsentEventKind kind, std::string grantee,
                FieldSet fields, TimestampMs now);
  /// Consented projection of a stored profile, shared with `recipients`.
  ShareResult share_profile(std::string_view by, const std::string& user_id, std::span<const Address> recipients,
                            TimestampMs now);
  ShareResult share_bytes(std::string_view by, ByteView plaintext, std::span<const Address> recipients,
                          TimestampMs now);
  const UserProfile& import_profile(std::string_view by, std::string_view item_id);

 private:
  Wallet& synced_wallet(std::string_view name);

  Chain chain_;
  std::vector<Member> members_;
};

}  // namespace permledger
