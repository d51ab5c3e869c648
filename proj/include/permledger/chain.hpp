#pragma once

#include <optional>
#include <vector>

#include "permledger/block.hpp"
#include "permledger/chain_state.hpp"
#include "permledger/error.hpp"

namespace permledger {

/// Fixed-size record kept in memory for every block; the block bytes
/// themselves live in the block store.
struct BlockIndexEntry {
  std::uint64_t height = 0;
  Hash256 block_hash{};
  std::uint64_t byte_offset = 0;
  std::uint32_t byte_length = 0;
  std::uint32_t tx_count = 0;
  TimestampMs timestamp = 0;
};

class BlockIndex {
 public:
  static constexpr std::size_t kEntryBytes = sizeof(BlockIndexEntry);
  static_assert(kEntryBytes <= 512);

  void append(const BlockIndexEntry& e) { entries_.push_back(e); }
  const std::vector<BlockIndexEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t memory_bytes() const { return entries_.size() * kEntryBytes; }

 private:
  std::vector<BlockIndexEntry> entries_;
};

struct ChainMemoryReport {
  std::size_t block_count = 0;
  std::size_t index_bytes = 0;
  std::size_t state_bytes = 0;
  std::size_t per_block_bytes = 0;
  std::size_t store_bytes = 0;
};

/// Append-only hash-linked chain with its block index and validated state.
/// Single writer: all mutation goes through append_block / accept_block.
class Chain {
 public:
  /// Genesis holds the founder's all-permission grant and the root stream.
  /// Throws Error(InvalidParams).
  static Chain create(const ChainParams& params, const NodeIdentity& founder, TimestampMs now);
  /// Starts a chain from a received genesis block. Throws ValidationError.
  static Chain from_genesis(const ChainParams& params, const Block& genesis);

  const ChainParams& params() const { return state_.params(); }
  const ChainState& state() const { return state_; }
  const BlockIndex& index() const { return index_; }
  std::uint64_t height() const { return index_.entries().back().height; }
  std::size_t block_count() const { return index_.size(); }
  const Hash256& tip_hash() const { return index_.entries().back().block_hash; }
  TimestampMs tip_timestamp() const { return index_.entries().back().timestamp; }
  Block block_at(std::uint64_t height) const;
  ByteView block_bytes(std::uint64_t height) const;

  /// Address due to produce block `height` under round-robin rotation over
  /// the current miner set; nullopt when nobody holds mine.
  std::optional<Address> scheduled_miner(std::uint64_t height) const;

  /// Throws Error(NotPermittedMiner), Error(BlockTooLarge) or
  /// InvalidTransactionError with the first offending index.
  Block append_block(std::vector<Transaction> txs, const NodeIdentity& miner, TimestampMs now);
  /// Full validation of an externally produced block. Throws ValidationError.
  void accept_block(const Block& block);

  /// Self-describing serialization of every block, tagged with the protocol.
  Bytes snapshot() const;
  ChainMemoryReport memory_report() const;

 private:
  explicit Chain(ChainState state) : state_(std::move(state)) {}

  void commit(const Block& block, Bytes encoded, ChainState next);
  ChainState check_block(const Block& block, std::size_t encoded_size) const;

  ChainState state_;
  BlockIndex index_;
  Bytes store_;
};

/// nullopt when the chain validates.
std::optional<ValidationError> validate_chain(const Chain& chain);
std::optional<ValidationError> validate_snapshot(ByteView snapshot);

struct CatchUpResult {
  std::optional<Chain> chain;  // replayed prefix; empty if genesis failed
  std::optional<ValidationError> error;
};

/// Replays a snapshot from genesis on a fresh node, halting at the first
/// invalid block.
CatchUpResult catch_up(ByteView snapshot);

/// Params embedded in a snapshot header. Throws Error(Decode/InvalidParams).
ChainParams snapshot_params(ByteView snapshot);

}  // namespace permledger
