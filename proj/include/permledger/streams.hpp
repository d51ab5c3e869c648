#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "permledger/chain_state.hpp"
#include "permledger/transaction.hpp"

namespace permledger {

/// Largest item payload that still fits in one block on this chain.
std::size_t max_item_size(const ChainParams& params, std::string_view stream, std::string_view key);

/// Signed stream-creation tx. Throws Error(Denied) without create,
/// Error(DuplicateName) when the name is taken.
Transaction create_stream(Wallet& wallet, const ChainState& state, std::string name, bool open);

/// Signed publish tx. An empty key is recorded as absent. Throws Error(Denied)
/// without send, Error(NoSuchStream), Error(NotStreamWriter), Error(ItemTooLarge).
Transaction publish(Wallet& wallet, const ChainState& state, std::string stream,
                    std::optional<std::string> key, Bytes data);

/// Signed stream-scoped write grant or revoke issued by the creator or an admin.
Transaction grant_stream_write(Wallet& wallet, const ChainState& state, const std::string& stream,
                               const Address& target, bool allow);

struct StreamSummary {
  std::string name;
  Address creator;
  bool open = false;
  std::size_t item_count = 0;
  std::size_t publisher_count = 0;
  bool subscribed = false;
};

struct ItemFilter {
  std::optional<std::string> key;
  std::optional<Address> publisher;
};

bool matches(const StreamItem& item, const ItemFilter& filter);

/// Node-local subscriptions. Subscribing only controls which item bodies the
/// node indexes; it is never written to the chain.
class StreamView {
 public:
  explicit StreamView(Address node) : node_(std::move(node)) {}

  const Address& node() const { return node_; }

  /// Idempotent. Throws Error(Denied) without receive, Error(NoSuchStream).
  void subscribe(const ChainState& state, std::string_view stream);
  void unsubscribe(std::string_view stream) { subscriptions_.erase(std::string(stream)); }
  bool subscribed(std::string_view stream) const { return subscriptions_.contains(std::string(stream)); }
  const std::set<std::string>& subscriptions() const { return subscriptions_; }

  /// Every stream with confirmed counts. Throws Error(Denied) without receive.
  std::vector<StreamSummary> list_streams(const ChainState& state) const;

  /// Items in (height, tx index) order, then unconfirmed items from `pending`.
  /// Throws Error(NotSubscribed), Error(Denied), Error(NoSuchStream).
  std::vector<StreamItem> get_items(const ChainState& state, std::string_view stream,
                                    const ItemFilter& filter = {},
                                    std::span<const Transaction> pending = {}) const;

 private:
  void require_receive(const ChainState& state) const;

  Address node_;
  std::set<std::string> subscriptions_;
};

}  // namespace permledger
