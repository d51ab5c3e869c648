#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace permledger {

enum class Permission : std::uint8_t;

/// Chain-wide configuration, read from a MultiChain-style `key = value` file.
struct ChainParams {
  std::string chain_name = "model";
  std::string description = "MultiChain model";
  std::string protocol_tag = "multichain";
  bool chain_is_testnet = false;
  std::string root_stream_name = "root";
  bool root_stream_open = true;
  std::uint64_t target_block_time = 15;  // seconds
  std::uint64_t max_block_size = 8388608;  // bytes

  bool anyone_can_connect = false;
  bool anyone_can_send = false;
  bool anyone_can_receive = false;
  bool anyone_can_receive_empty = true;
  bool anyone_can_create = false;
  bool anyone_can_issue = false;
  bool anyone_can_mine = false;
  bool anyone_can_activate = false;
  bool anyone_can_admin = false;
  // Parsed and persisted; has no effect on validation.
  bool miner_precheck = true;

  static constexpr std::uint64_t kMinBlockTime = 5;
  static constexpr std::uint64_t kMaxBlockTime = 86400;
  static constexpr std::uint64_t kMinBlockSize = 1000;
  static constexpr std::uint64_t kMaxBlockSize = 1000000000;

  /// Global default for a permission flag (the `anyone-can-*` switches).
  bool anyone_can(Permission flag) const;

  /// Throws Error(InvalidParams) naming the offending key.
  void validate() const;

  /// `key = value` lines; `#` starts a comment. Unknown keys are rejected.
  /// `chain-name` is optional and defaults to `default_name`.
  static ChainParams parse(std::string_view text, std::string_view default_name = "model");
  std::string to_text() const;

  bool operator==(const ChainParams&) const = default;
};

}  // namespace permledger
