#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "permledger/chain_params.hpp"
#include "permledger/error.hpp"
#include "permledger/identity.hpp"

namespace permledger {

/// The eight grantable rights, plus `ReceiveEmpty`, which can only be
/// queried (it comes from `anyone-can-receive-empty` or from `Receive`).
enum class Permission : std::uint8_t {
  Connect,
  Send,
  Receive,
  Issue,
  Create,
  Mine,
  Activate,
  Admin,
  ReceiveEmpty,
};

inline constexpr std::array<Permission, 8> kGrantablePermissions = {
    Permission::Connect, Permission::Send, Permission::Receive, Permission::Issue,
    Permission::Create,  Permission::Mine, Permission::Activate, Permission::Admin};

std::string_view to_string(Permission p);
std::optional<Permission> parse_permission(std::string_view name);

class PermissionSet {
 public:
  constexpr PermissionSet() = default;
  PermissionSet(std::initializer_list<Permission> flags);

  static constexpr PermissionSet all() { return PermissionSet(0xff); }
  static constexpr PermissionSet from_bits(std::uint8_t bits) { return PermissionSet(bits); }
  /// Comma-separated names, whitespace tolerated ("connect, send").
  /// Throws Error(Usage) on unknown or query-only names.
  static PermissionSet parse(std::string_view list);

  bool contains(Permission p) const;
  void insert(Permission p);
  void erase(Permission p);

  constexpr std::uint8_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  std::size_t size() const;
  std::vector<Permission> flags() const;
  std::string to_string() const;

  friend constexpr PermissionSet operator|(PermissionSet a, PermissionSet b) {
    return PermissionSet(static_cast<std::uint8_t>(a.bits_ | b.bits_));
  }
  friend constexpr PermissionSet operator&(PermissionSet a, PermissionSet b) {
    return PermissionSet(static_cast<std::uint8_t>(a.bits_ & b.bits_));
  }
  friend constexpr PermissionSet operator-(PermissionSet a, PermissionSet b) {
    return PermissionSet(static_cast<std::uint8_t>(a.bits_ & ~b.bits_));
  }
  bool operator==(const PermissionSet&) const = default;

 private:
  constexpr explicit PermissionSet(std::uint8_t bits) : bits_(bits) {}

  std::uint8_t bits_ = 0;
};

/// Flags an `activate` holder may change.
inline const PermissionSet kActivateScope{Permission::Connect, Permission::Send, Permission::Receive};

/// Grant/revoke body. A non-empty `stream` scopes the change to write rights
/// on that stream, in which case only `Send` may appear.
struct GrantPayload {
  Address target;
  PermissionSet add;
  PermissionSet remove;
  std::string stream;

  bool operator==(const GrantPayload&) const = default;
};

/// Explicit per-address sets plus the chain's `anyone-can-*` defaults.
class PermissionStateMap {
 public:
  explicit PermissionStateMap(const ChainParams& params);

  PermissionSet explicit_set(const Address& address) const;
  PermissionSet effective_set(const Address& address) const { return explicit_set(address) | defaults_; }
  PermissionSet defaults() const { return defaults_; }
  bool receive_empty_default() const { return receive_empty_; }

  const std::map<Address, PermissionSet>& entries() const { return entries_; }
  void set(const Address& address, PermissionSet flags);
  std::size_t holders(Permission p) const;

  bool operator==(const PermissionStateMap&) const = default;

 private:
  std::map<Address, PermissionSet> entries_;
  PermissionSet defaults_;
  bool receive_empty_ = false;
};

bool check_permission(const PermissionStateMap& state, const Address& address, Permission flag);

/// First flag in `touched` that a signer holding `rights` may not change:
/// admin may change anything, activate only connect/send/receive.
std::optional<Permission> first_unauthorized(PermissionSet rights, PermissionSet touched);

/// Applies a global grant/revoke signed by `signer`. Throws Error(NotAuthorized)
/// for the first unauthorized flag, Error(LastAdmin) when no admin would remain,
/// Error(InvalidTransaction) when add and remove overlap. Stream-scoped payloads
/// are not handled here (see ChainState).
PermissionStateMap apply_grant(const PermissionStateMap& state, const Address& signer,
                               const GrantPayload& grant);

class ChainState;
struct Transaction;

struct AuthDecision {
  bool ok = true;
  ErrorCode code = ErrorCode::Denied;
  std::optional<Permission> missing;
  std::string reason;

  static AuthDecision allow() { return {}; }
  static AuthDecision deny(ErrorCode code, std::optional<Permission> missing, std::string reason) {
    return {false, code, missing, std::move(reason)};
  }
  explicit operator bool() const { return ok; }
};

/// Permission gate for a transaction against current state. Validity rules
/// that are not about rights (nonces, duplicate names, last admin) live in
/// ChainState::apply.
AuthDecision authorize_tx(const ChainState& state, const Transaction& tx);

}  // namespace permledger
