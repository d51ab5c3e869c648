#include "permledger/streams.hpp"

#include "permledger/block.hpp"
#include "permledger/error.hpp"

namespace permledger {

namespace {

// Everything a publish tx carries besides the data: id, signer, key, nonce,
// kind, length prefixes and signature.
constexpr std::size_t kPublishTxFraming = 32 + 4 + 64 + 32 + 8 + 1 + 4 + 1 + 4 + 4 + 64 + 4;

void require(const ChainState& state, const Address& who, Permission p) {
  if (!check_permission(state.permissions(), who, p)) {
    throw Error(ErrorCode::Denied, who.str() + " lacks " + std::string(to_string(p)));
  }
}

}  // namespace

std::size_t max_item_size(const ChainParams& params, std::string_view stream, std::string_view key) {
  const std::size_t overhead = kBlockFramingBytes + kPublishTxFraming + stream.size() + key.size();
  return params.max_block_size > overhead ? params.max_block_size - overhead : 0;
}

Transaction create_stream(Wallet& wallet, const ChainState& state, std::string name, bool open) {
  require(state, wallet.address(), Permission::Create);
  if (name.empty()) throw Error(ErrorCode::InvalidTransaction, "stream name must not be empty");
  if (state.find_stream(name)) throw Error(ErrorCode::DuplicateName, "stream '" + name + "' already exists");
  wallet.sync_nonce(state.next_nonce(wallet.address()));
  return wallet.sign(StreamCreatePayload{std::move(name), open});
}

Transaction publish(Wallet& wallet, const ChainState& state, std::string stream, std::optional<std::string> key,
                    Bytes data) {
  require(state, wallet.address(), Permission::Send);
  const auto* rec = state.find_stream(stream);
  if (rec == nullptr) throw Error(ErrorCode::NoSuchStream, "no stream named '" + stream + "'");
  if (!rec->may_write(wallet.address())) {
    throw Error(ErrorCode::NotStreamWriter, wallet.address().str() + " may not write to '" + stream + "'");
  }
  if (key && key->empty()) key.reset();
  const auto limit = max_item_size(state.params(), stream, key.value_or(""));
  if (data.size() > limit) {
    throw Error(ErrorCode::ItemTooLarge,
                "item of " + std::to_string(data.size()) + " bytes exceeds " + std::to_string(limit));
  }
  wallet.sync_nonce(state.next_nonce(wallet.address()));
  return wallet.sign(StreamPublishPayload{std::move(stream), std::move(key), std::move(data)});
}

Transaction grant_stream_write(Wallet& wallet, const ChainState& state, const std::string& stream,
                               const Address& target, bool allow) {
  const auto* rec = state.find_stream(stream);
  if (rec == nullptr) throw Error(ErrorCode::NoSuchStream, "no stream named '" + stream + "'");
  if (rec->info.creator != wallet.address() &&
      !check_permission(state.permissions(), wallet.address(), Permission::Admin)) {
    throw Error(ErrorCode::Denied, "only the creator or an admin may change writers of '" + stream + "'");
  }
  wallet.sync_nonce(state.next_nonce(wallet.address()));
  const PermissionSet write{Permission::Send};
  if (allow) return wallet.sign(GrantPayload{target, write, {}, stream});
  return wallet.sign(RevokePayload{GrantPayload{target, {}, write, stream}});
}

bool matches(const StreamItem& item, const ItemFilter& filter) {
  if (filter.key && item.key != filter.key) return false;
  if (filter.publisher && item.publisher != *filter.publisher) return false;
  return true;
}

void StreamView::require_receive(const ChainState& state) const { require(state, node_, Permission::Receive); }

void StreamView::subscribe(const ChainState& state, std::string_view stream) {
  require_receive(state);
  if (!state.find_stream(stream)) throw Error(ErrorCode::NoSuchStream, "no stream named '" + std::string(stream) + "'");
  subscriptions_.insert(std::string(stream));
}

std::vector<StreamSummary> StreamView::list_streams(const ChainState& state) const {
  require_receive(state);
  std::vector<StreamSummary> out;
  for (const auto& [name, rec] : state.streams()) {
    out.push_back({name, rec.info.creator, rec.info.open, rec.items.size(), rec.publishers.size(), subscribed(name)});
  }
  return out;
}

std::vector<StreamItem> StreamView::get_items(const ChainState& state, std::string_view stream,
                                              const ItemFilter& filter,
                                              std::span<const Transaction> pending) const {
  require_receive(state);
  const auto* rec = state.find_stream(stream);
  if (rec == nullptr) throw Error(ErrorCode::NoSuchStream, "no stream named '" + std::string(stream) + "'");
  if (!subscribed(stream)) {
    throw Error(ErrorCode::NotSubscribed, node_.str() + " is not subscribed to '" + std::string(stream) + "'");
  }
  std::vector<StreamItem> out;
  for (const auto& item : rec->items) {
    if (matches(item, filter)) out.push_back(item);
  }
  for (const auto& tx : pending) {
    const auto* p = std::get_if<StreamPublishPayload>(&tx.payload);
    if (p == nullptr || p->stream != stream) continue;
    StreamItem item{p->stream, tx.signer, p->key, p->data, 0, false, {}, tx.tx_id};
    if (matches(item, filter)) out.push_back(std::move(item));
  }
  return out;
}

}  // namespace permledger
