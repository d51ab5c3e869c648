#include "permledger/chain_params.hpp"

#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "permledger/error.hpp"
#include "permledger/permissions.hpp"

namespace permledger {

namespace {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

[[noreturn]] void invalid(std::string_view key, const std::string& why) {
  throw Error(ErrorCode::InvalidParams, std::string(key) + ": " + why);
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true") return true;
  if (v == "false") return false;
  invalid(key, "expected true or false, got '" + std::string(v) + "'");
}

std::uint64_t parse_uint(std::string_view key, std::string_view v) {
  if (v.empty() || v.size() > 19) invalid(key, "expected an integer, got '" + std::string(v) + "'");
  std::uint64_t out = 0;
  for (char c : v) {
    if (c < '0' || c > '9') invalid(key, "expected an integer, got '" + std::string(v) + "'");
    out = out * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return out;
}

// One row per key, in the order the file is written.
struct Field {
  const char* key;
  std::function<void(ChainParams&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const ChainParams&)> get;
};

template <typename M>
Field bool_field(const char* key, M member) {
  return {key, [member](ChainParams& p, std::string_view k, std::string_view v) { p.*member = parse_bool(k, v); },
          [member](const ChainParams& p) { return std::string(p.*member ? "true" : "false"); }};
}

template <typename M>
Field uint_field(const char* key, M member) {
  return {key, [member](ChainParams& p, std::string_view k, std::string_view v) { p.*member = parse_uint(k, v); },
          [member](const ChainParams& p) { return std::to_string(p.*member); }};
}

template <typename M>
Field string_field(const char* key, M member) {
  return {key, [member](ChainParams& p, std::string_view, std::string_view v) { p.*member = std::string(v); },
          [member](const ChainParams& p) { return p.*member; }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = {
      string_field("chain-name", &ChainParams::chain_name),
      string_field("chain-protocol", &ChainParams::protocol_tag),
      string_field("chain-description", &ChainParams::description),
      string_field("root-stream-name", &ChainParams::root_stream_name),
      bool_field("root-stream-open", &ChainParams::root_stream_open),
      bool_field("chain-is-testnet", &ChainParams::chain_is_testnet),
      uint_field("target-block-time", &ChainParams::target_block_time),
      uint_field("maximum-block-size", &ChainParams::max_block_size),
      bool_field("anyone-can-connect", &ChainParams::anyone_can_connect),
      bool_field("anyone-can-send", &ChainParams::anyone_can_send),
      bool_field("anyone-can-receive", &ChainParams::anyone_can_receive),
      bool_field("anyone-can-receive-empty", &ChainParams::anyone_can_receive_empty),
      bool_field("anyone-can-create", &ChainParams::anyone_can_create),
      bool_field("anyone-can-issue", &ChainParams::anyone_can_issue),
      bool_field("anyone-can-mine", &ChainParams::anyone_can_mine),
      bool_field("anyone-can-activate", &ChainParams::anyone_can_activate),
      bool_field("anyone-can-admin", &ChainParams::anyone_can_admin),
      bool_field("support-miner-precheck", &ChainParams::miner_precheck),
  };
  return kFields;
}

bool text_value_ok(std::string_view v) {
  for (char c : v) {
    if (c == '#' || c == '\n' || c == '\r') return false;
  }
  return v == trim(v);
}

}  // namespace

bool ChainParams::anyone_can(Permission flag) const {
  switch (flag) {
    case Permission::Connect: return anyone_can_connect;
    case Permission::Send: return anyone_can_send;
    case Permission::Receive: return anyone_can_receive;
    case Permission::Issue: return anyone_can_issue;
    case Permission::Create: return anyone_can_create;
    case Permission::Mine: return anyone_can_mine;
    case Permission::Activate: return anyone_can_activate;
    case Permission::Admin: return anyone_can_admin;
    case Permission::ReceiveEmpty: return anyone_can_receive_empty;
  }
  return false;
}

void ChainParams::validate() const {
  if (target_block_time < kMinBlockTime || target_block_time > kMaxBlockTime) {
    invalid("target-block-time", std::to_string(target_block_time) + " outside (5 - 86400)");
  }
  if (max_block_size < kMinBlockSize || max_block_size > kMaxBlockSize) {
    invalid("maximum-block-size", std::to_string(max_block_size) + " outside (1000 - 1000000000)");
  }
  if (chain_name.empty()) invalid("chain-name", "must not be empty");
  if (root_stream_name.empty()) invalid("root-stream-name", "must not be empty");
  for (const auto& [key, value] : {std::pair<const char*, const std::string*>{"chain-name", &chain_name},
                                   {"chain-protocol", &protocol_tag},
                                   {"chain-description", &description},
                                   {"root-stream-name", &root_stream_name}}) {
    if (!text_value_ok(*value)) invalid(key, "must not contain '#', newlines or edge whitespace");
  }
}

ChainParams ChainParams::parse(std::string_view text, std::string_view default_name) {
  ChainParams p;
  p.chain_name = std::string(default_name);
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidParams, "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    const Field* field = nullptr;
    for (const auto& f : fields()) {
      if (key == f.key) field = &f;
    }
    if (field == nullptr) invalid(key, "unknown parameter");
    if (!seen.insert(std::string(key)).second) invalid(key, "duplicate parameter");
    field->set(p, key, value);
  }
  p.validate();
  return p;
}

std::string ChainParams::to_text() const {
  std::ostringstream out;
  for (const auto& f : fields()) out << f.key << " = " << f.get(*this) << "\n";
  return out.str();
}

}  // namespace permledger
