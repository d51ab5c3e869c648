#pragma once

#include <vector>

#include "permledger/transaction.hpp"

namespace permledger {

struct Block {
  std::uint64_t height = 0;
  Hash256 prev_hash{};
  TimestampMs timestamp = 0;
  Address miner;
  crypto::PublicKey miner_key{};
  std::vector<Transaction> transactions;
  Hash256 block_hash{};
  crypto::Signature miner_signature{};

  /// Digest over the ordered transaction ids.
  Hash256 tx_root() const;
  /// Canonical header: height, prev_hash, timestamp, miner, miner_key, tx count, tx_root.
  Bytes header_bytes() const;
  Hash256 compute_hash() const { return crypto::sha256(header_bytes()); }
  bool signature_valid() const;

  Bytes encode() const;
  static Block decode(ByteView data);

  static Block seal(std::uint64_t height, const Hash256& prev_hash, TimestampMs timestamp,
                    const NodeIdentity& miner, std::vector<Transaction> txs);

  bool operator==(const Block&) const = default;
};

/// Upper bound on everything in an encoded block other than its transactions.
inline constexpr std::size_t kBlockFramingBytes = 256;

}  // namespace permledger
