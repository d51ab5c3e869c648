#include "permledger/block.hpp"

#include "permledger/codec.hpp"
#include "permledger/error.hpp"

namespace permledger {

namespace {
constexpr std::uint32_t kBlockMagic = 0x504c4231;  // "PLB1"
}

Hash256 Block::tx_root() const {
  Writer w;
  w.u32(static_cast<std::uint32_t>(transactions.size()));
  for (const auto& tx : transactions) w.raw(tx.tx_id);
  return crypto::sha256(w.data());
}

Bytes Block::header_bytes() const {
  Writer w;
  w.u64(height);
  w.raw(prev_hash);
  w.u64(timestamp);
  w.str(miner.str());
  w.raw(miner_key);
  w.u32(static_cast<std::uint32_t>(transactions.size()));
  w.raw(tx_root());
  return w.take();
}

bool Block::signature_valid() const {
  return verify_signed_by(miner, miner_key, block_hash, miner_signature);
}

Bytes Block::encode() const {
  Writer w;
  w.u32(kBlockMagic);
  w.u64(height);
  w.raw(prev_hash);
  w.u64(timestamp);
  w.str(miner.str());
  w.raw(miner_key);
  w.u32(static_cast<std::uint32_t>(transactions.size()));
  for (const auto& tx : transactions) w.bytes(tx.encode());
  w.raw(block_hash);
  w.raw(miner_signature);
  return w.take();
}

Block Block::decode(ByteView data) {
  Reader r(data);
  if (r.u32() != kBlockMagic) throw Error(ErrorCode::Decode, "bad block magic");
  Block b;
  b.height = r.u64();
  b.prev_hash = r.fixed<32>();
  b.timestamp = r.u64();
  b.miner = Address::parse_or_throw(r.str());
  b.miner_key = r.fixed<crypto::kKeySize>();
  auto count = r.u32();
  // Each transaction needs well over 4 bytes, so this bounds the reservation.
  if (count > r.remaining() / 4) throw Error(ErrorCode::Decode, "transaction count exceeds input");
  b.transactions.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) b.transactions.push_back(Transaction::decode(r.bytes_view()));
  b.block_hash = r.fixed<32>();
  b.miner_signature = r.fixed<crypto::kSignatureSize>();
  r.expect_done();
  return b;
}

Block Block::seal(std::uint64_t height, const Hash256& prev_hash, TimestampMs timestamp,
                  const NodeIdentity& miner, std::vector<Transaction> txs) {
  Block b;
  b.height = height;
  b.prev_hash = prev_hash;
  b.timestamp = timestamp;
  b.miner = miner.address();
  b.miner_key = miner.public_key();
  b.transactions = std::move(txs);
  b.block_hash = b.compute_hash();
  b.miner_signature = miner.sign(b.block_hash);
  return b;
}

}  // namespace permledger
