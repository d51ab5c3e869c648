#include "permledger/permissions.hpp"

#include <bit>

#include "permledger/chain_state.hpp"
#include "permledger/transaction.hpp"

namespace permledger {

namespace {

constexpr std::uint8_t bit(Permission p) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(p)); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view to_string(Permission p) {
  switch (p) {
    case Permission::Connect: return "connect";
    case Permission::Send: return "send";
    case Permission::Receive: return "receive";
    case Permission::Issue: return "issue";
    case Permission::Create: return "create";
    case Permission::Mine: return "mine";
    case Permission::Activate: return "activate";
    case Permission::Admin: return "admin";
    case Permission::ReceiveEmpty: return "receive-empty";
  }
  return "?";
}

std::optional<Permission> parse_permission(std::string_view name) {
  for (auto p : kGrantablePermissions) {
    if (to_string(p) == name) return p;
  }
  if (name == "receive-empty") return Permission::ReceiveEmpty;
  return std::nullopt;
}

PermissionSet::PermissionSet(std::initializer_list<Permission> flags) {
  for (auto p : flags) insert(p);
}

PermissionSet PermissionSet::parse(std::string_view list) {
  PermissionSet out;
  while (true) {
    auto comma = list.find(',');
    auto item = trim(list.substr(0, comma));
    if (item.empty()) throw Error(ErrorCode::Usage, "empty permission name in list");
    auto p = parse_permission(item);
    if (!p || *p == Permission::ReceiveEmpty) {
      throw Error(ErrorCode::Usage, "unknown permission '" + std::string(item) + "'");
    }
    out.insert(*p);
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  return out;
}

bool PermissionSet::contains(Permission p) const {
  if (p == Permission::ReceiveEmpty) return false;
  return (bits_ & bit(p)) != 0;
}

void PermissionSet::insert(Permission p) {
  if (p == Permission::ReceiveEmpty) throw Error(ErrorCode::Usage, "receive-empty cannot be granted");
  bits_ = static_cast<std::uint8_t>(bits_ | bit(p));
}

void PermissionSet::erase(Permission p) {
  if (p == Permission::ReceiveEmpty) return;
  bits_ = static_cast<std::uint8_t>(bits_ & ~bit(p));
}

std::size_t PermissionSet::size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

std::vector<Permission> PermissionSet::flags() const {
  std::vector<Permission> out;
  for (auto p : kGrantablePermissions) {
    if (contains(p)) out.push_back(p);
  }
  return out;
}

std::string PermissionSet::to_string() const {
  std::string out;
  for (auto p : flags()) {
    if (!out.empty()) out += ",";
    out += permledger::to_string(p);
  }
  return out;
}

PermissionStateMap::PermissionStateMap(const ChainParams& params)
    : receive_empty_(params.anyone_can_receive_empty) {
  for (auto p : kGrantablePermissions) {
    if (params.anyone_can(p)) defaults_.insert(p);
  }
}

PermissionSet PermissionStateMap::explicit_set(const Address& address) const {
  auto it = entries_.find(address);
  return it == entries_.end() ? PermissionSet{} : it->second;
}

void PermissionStateMap::set(const Address& address, PermissionSet flags) {
  if (flags.empty()) {
    entries_.erase(address);
  } else {
    entries_[address] = flags;
  }
}

std::size_t PermissionStateMap::holders(Permission p) const {
  std::size_t n = 0;
  for (const auto& [addr, flags] : entries_) {
    if (flags.contains(p)) ++n;
  }
  return n;
}

bool check_permission(const PermissionStateMap& state, const Address& address, Permission flag) {
  if (flag == Permission::ReceiveEmpty) {
    return state.receive_empty_default() || check_permission(state, address, Permission::Receive);
  }
  return state.effective_set(address).contains(flag);
}

std::optional<Permission> first_unauthorized(PermissionSet rights, PermissionSet touched) {
  if (rights.contains(Permission::Admin)) return std::nullopt;
  PermissionSet allowed = rights.contains(Permission::Activate) ? kActivateScope : PermissionSet{};
  auto outside = touched - allowed;
  if (outside.empty()) return std::nullopt;
  return outside.flags().front();
}

PermissionStateMap apply_grant(const PermissionStateMap& state, const Address& signer,
                               const GrantPayload& grant) {
  if (!(grant.add & grant.remove).empty()) {
    throw Error(ErrorCode::InvalidTransaction, "grant adds and removes the same flag");
  }
  if (grant.add.empty() && grant.remove.empty()) return state;
  if (auto bad = first_unauthorized(state.effective_set(signer), grant.add | grant.remove)) {
    throw Error(ErrorCode::NotAuthorized, "not authorized to change '" + std::string(to_string(*bad)) + "'");
  }
  PermissionStateMap next = state;
  next.set(grant.target, (state.explicit_set(grant.target) | grant.add) - grant.remove);
  if (grant.remove.contains(Permission::Admin) && !next.defaults().contains(Permission::Admin) &&
      next.holders(Permission::Admin) == 0) {
    throw Error(ErrorCode::LastAdmin, "revocation would leave the chain without an admin");
  }
  return next;
}

AuthDecision authorize_tx(const ChainState& state, const Transaction& tx) {
  const auto& perms = state.permissions();
  const auto rights = perms.effective_set(tx.signer);
  return std::visit(
      [&](const auto& payload) -> AuthDecision {
        using T = std::decay_t<decltype(payload)>;
        if constexpr (std::is_same_v<T, StreamCreatePayload>) {
          if (!rights.contains(Permission::Create)) {
            return AuthDecision::deny(ErrorCode::Denied, Permission::Create, "signer lacks create");
          }
          return AuthDecision::allow();
        } else if constexpr (std::is_same_v<T, StreamPublishPayload>) {
          if (!rights.contains(Permission::Send)) {
            return AuthDecision::deny(ErrorCode::Denied, Permission::Send, "signer lacks send");
          }
          const auto* stream = state.find_stream(payload.stream);
          if (stream == nullptr) {
            return AuthDecision::deny(ErrorCode::NoSuchStream, std::nullopt,
                                      "no stream named '" + payload.stream + "'");
          }
          if (!stream->may_write(tx.signer)) {
            return AuthDecision::deny(ErrorCode::NotStreamWriter, std::nullopt,
                                      "signer may not write to '" + payload.stream + "'");
          }
          return AuthDecision::allow();
        } else {
          const GrantPayload& change = payload;
          if (!change.stream.empty()) {
            const auto* stream = state.find_stream(change.stream);
            if (stream == nullptr) {
              return AuthDecision::deny(ErrorCode::NoSuchStream, std::nullopt,
                                        "no stream named '" + change.stream + "'");
            }
            if (!rights.contains(Permission::Admin) && stream->info.creator != tx.signer) {
              return AuthDecision::deny(ErrorCode::Denied, Permission::Admin,
                                        "only the creator or an admin may change writers of '" +
                                            change.stream + "'");
            }
            return AuthDecision::allow();
          }
          if (auto bad = first_unauthorized(rights, change.add | change.remove)) {
            return AuthDecision::deny(ErrorCode::NotAuthorized, *bad,
                                      "not authorized to change '" + std::string(to_string(*bad)) + "'");
          }
          return AuthDecision::allow();
        }
      },
      tx.payload);
}

}  // namespace permledger
