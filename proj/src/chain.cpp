#include "permledger/chain.hpp"

#include <algorithm>

#include "permledger/codec.hpp"

namespace permledger {

namespace {

constexpr std::string_view kSnapshotMagic = "PLSNAP01";
constexpr std::uint32_t kSnapshotVersion = 1;

constexpr std::uint64_t kFounderNonceGrant = 0;
constexpr std::uint64_t kFounderNonceRoot = 1;

bool is_zero(const Hash256& h) {
  return std::all_of(h.begin(), h.end(), [](auto b) { return b == 0; });
}

void check_tx_integrity(const Block& block) {
  for (const auto& tx : block.transactions) {
    if (!tx.id_matches()) throw ValidationError(block.height, ValidationReason::HashMismatch, "transaction id");
    if (!tx.signature_valid()) {
      throw ValidationError(block.height, ValidationReason::BadSignature, "transaction signature");
    }
  }
  if (block.compute_hash() != block.block_hash) {
    throw ValidationError(block.height, ValidationReason::HashMismatch, "block hash");
  }
  if (!block.signature_valid()) {
    throw ValidationError(block.height, ValidationReason::BadSignature, "miner signature");
  }
}

}  // namespace

Chain Chain::create(const ChainParams& params, const NodeIdentity& founder, TimestampMs now) {
  params.validate();
  std::vector<Transaction> txs;
  txs.push_back(Transaction::sign(founder, kFounderNonceGrant,
                                  GrantPayload{founder.address(), PermissionSet::all(), {}, {}}));
  txs.push_back(Transaction::sign(founder, kFounderNonceRoot,
                                  StreamCreatePayload{params.root_stream_name, params.root_stream_open}));
  auto genesis = Block::seal(0, Hash256{}, now, founder, std::move(txs));
  return from_genesis(params, genesis);
}

Chain Chain::from_genesis(const ChainParams& params, const Block& genesis) {
  if (genesis.height != 0 || !is_zero(genesis.prev_hash)) {
    throw ValidationError(0, ValidationReason::BadGenesis, "genesis must have height 0 and zero prev_hash");
  }
  check_tx_integrity(genesis);
  const auto& txs = genesis.transactions;
  const auto* grant = txs.size() == 2 ? std::get_if<GrantPayload>(&txs[0].payload) : nullptr;
  const auto* root = txs.size() == 2 ? std::get_if<StreamCreatePayload>(&txs[1].payload) : nullptr;
  if (grant == nullptr || root == nullptr || grant->target != genesis.miner || grant->add != PermissionSet::all() ||
      !grant->remove.empty() || !grant->stream.empty() || root->name != params.root_stream_name ||
      root->open != params.root_stream_open || txs[0].signer != genesis.miner || txs[1].signer != genesis.miner) {
    throw ValidationError(0, ValidationReason::BadGenesis, "unexpected genesis contents");
  }
  auto encoded = genesis.encode();
  if (encoded.size() > params.max_block_size) throw ValidationError(0, ValidationReason::Oversize);

  ChainState state(params);
  try {
    for (std::uint32_t i = 0; i < txs.size(); ++i) state.apply(txs[i], ItemRef{0, i}, genesis.timestamp, true);
  } catch (const Error& e) {
    throw ValidationError(0, ValidationReason::BadGenesis, e.what());
  }
  Chain chain{ChainState(params)};
  chain.commit(genesis, std::move(encoded), std::move(state));
  return chain;
}

Block Chain::block_at(std::uint64_t height) const { return Block::decode(block_bytes(height)); }

ByteView Chain::block_bytes(std::uint64_t height) const {
  if (height >= index_.size()) throw Error(ErrorCode::NotFound, "no block at height " + std::to_string(height));
  const auto& e = index_.entries()[height];
  return ByteView(store_).subspan(e.byte_offset, e.byte_length);
}

std::optional<Address> Chain::scheduled_miner(std::uint64_t height) const {
  auto miners = state_.miners();
  if (miners.empty()) return std::nullopt;
  return miners[height % miners.size()];
}

Block Chain::append_block(std::vector<Transaction> txs, const NodeIdentity& miner, TimestampMs now) {
  const auto next_height = height() + 1;
  if (!check_permission(state_.permissions(), miner.address(), Permission::Mine)) {
    throw Error(ErrorCode::NotPermittedMiner, miner.address().str() + " does not hold mine");
  }
  if (scheduled_miner(next_height) != miner.address()) {
    throw Error(ErrorCode::NotPermittedMiner,
                miner.address().str() + " is out of turn for height " + std::to_string(next_height));
  }
  const auto timestamp = std::max(now, tip_timestamp());
  ChainState next = state_;
  for (std::uint32_t i = 0; i < txs.size(); ++i) {
    try {
      next.apply(txs[i], ItemRef{next_height, i}, timestamp);
    } catch (const Error& e) {
      throw InvalidTransactionError(i, e.code(), e.what());
    }
  }
  auto block = Block::seal(next_height, tip_hash(), timestamp, miner, std::move(txs));
  auto encoded = block.encode();
  if (encoded.size() > params().max_block_size) {
    throw Error(ErrorCode::BlockTooLarge, "block of " + std::to_string(encoded.size()) + " bytes exceeds " +
                                              std::to_string(params().max_block_size));
  }
  next.set_best_height(next_height);
  commit(block, std::move(encoded), std::move(next));
  return block;
}

ChainState Chain::check_block(const Block& block, std::size_t encoded_size) const {
  const auto expected = height() + 1;
  if (block.height != expected || block.prev_hash != tip_hash()) {
    throw ValidationError(block.height, ValidationReason::BrokenLink,
                          "expected height " + std::to_string(expected) + " linked to the tip");
  }
  check_tx_integrity(block);
  if (block.timestamp < tip_timestamp()) throw ValidationError(block.height, ValidationReason::BadTimestamp);
  if (encoded_size > params().max_block_size) throw ValidationError(block.height, ValidationReason::Oversize);
  if (scheduled_miner(block.height) != block.miner) {
    throw ValidationError(block.height, ValidationReason::UnpermittedMiner, block.miner.str());
  }
  ChainState next = state_;
  for (std::uint32_t i = 0; i < block.transactions.size(); ++i) {
    try {
      next.apply(block.transactions[i], ItemRef{block.height, i}, block.timestamp);
    } catch (const Error& e) {
      throw ValidationError(block.height, ValidationReason::InvalidTransaction,
                            "tx " + std::to_string(i) + ": " + e.what());
    }
  }
  next.set_best_height(block.height);
  return next;
}

void Chain::accept_block(const Block& block) {
  auto encoded = block.encode();
  auto next = check_block(block, encoded.size());
  commit(block, std::move(encoded), std::move(next));
}

void Chain::commit(const Block& block, Bytes encoded, ChainState next) {
  BlockIndexEntry e;
  e.height = block.height;
  e.block_hash = block.block_hash;
  e.byte_offset = store_.size();
  e.byte_length = static_cast<std::uint32_t>(encoded.size());
  e.tx_count = static_cast<std::uint32_t>(block.transactions.size());
  e.timestamp = block.timestamp;
  store_.insert(store_.end(), encoded.begin(), encoded.end());
  index_.append(e);
  next.set_best_height(block.height);
  state_ = std::move(next);
}

Bytes Chain::snapshot() const {
  Writer w;
  w.raw(as_bytes(kSnapshotMagic));
  w.u32(kSnapshotVersion);
  const auto params_text = params().to_text();
  w.str(params().protocol_tag);
  w.str(params_text);
  w.raw(crypto::sha256(as_bytes(params_text)));
  w.u32(static_cast<std::uint32_t>(index_.size()));
  for (std::uint64_t h = 0; h < index_.size(); ++h) w.bytes(block_bytes(h));
  return w.take();
}

ChainMemoryReport Chain::memory_report() const {
  ChainMemoryReport r;
  r.block_count = index_.size();
  r.index_bytes = index_.memory_bytes();
  r.state_bytes = state_.accounted_bytes();
  r.per_block_bytes = r.block_count == 0 ? 0 : r.index_bytes / r.block_count;
  r.store_bytes = store_.size();
  return r;
}

namespace {

struct SnapshotHeader {
  ChainParams params;
  std::uint32_t block_count = 0;
};

SnapshotHeader read_header(Reader& r) {
  if (to_string(r.raw(kSnapshotMagic.size())) != kSnapshotMagic) {
    throw ValidationError(0, ValidationReason::DecodeError, "not a chain snapshot");
  }
  if (r.u32() != kSnapshotVersion) throw ValidationError(0, ValidationReason::DecodeError, "unsupported snapshot version");
  auto tag = r.str();
  auto text = r.str();
  auto digest = r.fixed<32>();
  if (crypto::sha256(as_bytes(text)) != digest) throw Error(ErrorCode::Decode, "params digest mismatch");
  SnapshotHeader h;
  h.params = ChainParams::parse(text);
  if (h.params.protocol_tag != tag) throw Error(ErrorCode::Decode, "protocol tag mismatch");
  h.block_count = r.u32();
  return h;
}

}  // namespace

ChainParams snapshot_params(ByteView snapshot) {
  Reader r(snapshot);
  return read_header(r).params;
}

CatchUpResult catch_up(ByteView snapshot) {
  CatchUpResult result;
  Reader r(snapshot);
  SnapshotHeader header;
  try {
    header = read_header(r);
  } catch (const ValidationError& e) {
    result.error = e;
    return result;
  } catch (const Error& e) {
    result.error = ValidationError(0, ValidationReason::ParamsMismatch, e.what());
    return result;
  }
  if (header.block_count == 0) {
    result.error = ValidationError(0, ValidationReason::BadGenesis, "snapshot holds no blocks");
    return result;
  }
  for (std::uint32_t h = 0; h < header.block_count; ++h) {
    try {
      Block block;
      try {
        block = Block::decode(r.bytes_view());
      } catch (const Error& e) {
        throw ValidationError(h, ValidationReason::DecodeError, e.what());
      }
      if (h == 0) {
        result.chain = Chain::from_genesis(header.params, block);
      } else {
        result.chain->accept_block(block);
      }
    } catch (const ValidationError& e) {
      result.error = e;
      return result;
    }
  }
  if (!r.done()) {
    result.error = ValidationError(header.block_count, ValidationReason::DecodeError, "trailing bytes after last block");
  }
  return result;
}

std::optional<ValidationError> validate_snapshot(ByteView snapshot) { return catch_up(snapshot).error; }

std::optional<ValidationError> validate_chain(const Chain& chain) { return validate_snapshot(chain.snapshot()); }

}  // namespace permledger
