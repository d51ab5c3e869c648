#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "permledger/chain_params.hpp"
#include "permledger/consent.hpp"
#include "permledger/permissions.hpp"
#include "permledger/transaction.hpp"

namespace permledger {

/// Position of a confirmed item: (block height, index within the block).
struct ItemRef {
  std::uint64_t height = 0;
  std::uint32_t tx_index = 0;

  auto operator<=>(const ItemRef&) const = default;
};

struct StreamItem {
  std::string stream;
  Address publisher;
  std::optional<std::string> key;
  Bytes data;
  TimestampMs published_at = 0;
  bool confirmed = false;
  ItemRef ref;
  Hash256 tx_id{};

  bool operator==(const StreamItem&) const = default;
};

struct Stream {
  std::string name;
  Address creator;
  bool open = false;
  TimestampMs created_at = 0;

  bool operator==(const Stream&) const = default;
};

struct StreamRecord {
  Stream info;
  std::vector<StreamItem> items;
  std::set<Address> writers;
  std::set<Address> publishers;

  bool may_write(const Address& a) const {
    return info.open || a == info.creator || writers.contains(a);
  }
  bool operator==(const StreamRecord&) const = default;
};

/// Cumulative result of applying every confirmed transaction.
class ChainState {
 public:
  explicit ChainState(ChainParams params);

  const ChainParams& params() const { return params_; }
  const PermissionStateMap& permissions() const { return permissions_; }
  const std::map<std::string, StreamRecord, std::less<>>& streams() const { return streams_; }
  const StreamRecord* find_stream(std::string_view name) const;
  const ConsentTable& consent() const { return consent_; }

  /// Height of the last applied block; nullopt before genesis.
  std::optional<std::uint64_t> best_height() const { return best_height_; }
  void set_best_height(std::uint64_t h) { best_height_ = h; }

  /// Smallest nonce the address may use next.
  std::uint64_t next_nonce(const Address& a) const;
  /// Addresses holding mine, ordered by address; the block-producer rotation.
  std::vector<Address> miners() const;

  /// SHA-256 over a canonical, key-sorted encoding of every state entry.
  Hash256 state_hash() const;
  /// Bytes retained for all permission, nonce, stream, item and consent entries.
  std::size_t accounted_bytes() const;

  /// Applies one transaction confirmed at `where`. With `bootstrap` the
  /// permission gate is skipped (genesis only). Throws Error; on error the
  /// state is left unchanged.
  void apply(const Transaction& tx, ItemRef where, TimestampMs block_time, bool bootstrap = false);

  bool operator==(const ChainState&) const = default;

 private:
  ChainParams params_;
  PermissionStateMap permissions_;
  std::map<std::string, StreamRecord, std::less<>> streams_;
  std::map<Address, std::uint64_t> nonces_;
  ConsentTable consent_;
  std::optional<std::uint64_t> best_height_;
};

}  // namespace permledger
