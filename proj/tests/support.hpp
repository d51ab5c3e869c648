#pragma once

#include <cstdint>
#include <functional>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "permledger/chain.hpp"
#include "permledger/consortium.hpp"

namespace testsupport {

using namespace permledger;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t next() { return rng_(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + rng_() % (hi - lo + 1); }
  double real(double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(rng_() >> 11) * 0x1.0p-53); }
  bool chance(double p) { return real(0, 1) < p; }
  Bytes bytes(std::size_t n) {
    Bytes out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(rng_());
    return out;
  }
  std::string word(std::size_t min_len, std::size_t max_len) {
    static constexpr char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz";
    std::string out(between(min_len, max_len), 'a');
    for (auto& c : out) c = kAlphabet[index(26)];
    return out;
  }
  PermissionSet permissions() { return PermissionSet::from_bits(static_cast<std::uint8_t>(rng_())); }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline NodeIdentity identity(const std::string& label) { return NodeIdentity::generate(as_bytes("test|" + label)); }

inline ChainParams fig3_params() {
  ChainParams p;
  p.chain_name = "model";
  return p;
}

/// Seals `txs` with whichever of `miners` is scheduled next.
inline Block mine(Chain& chain, std::vector<Transaction> txs, const std::vector<const NodeIdentity*>& miners,
                  TimestampMs now = 0) {
  auto scheduled = chain.scheduled_miner(chain.height() + 1);
  for (const auto* m : miners) {
    if (scheduled && m->address() == *scheduled) {
      return chain.append_block(std::move(txs), *m, std::max(now, chain.tip_timestamp()));
    }
  }
  throw Error(ErrorCode::NotPermittedMiner, "no scheduled miner among the given identities");
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("permledger-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testsupport
