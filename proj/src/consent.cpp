#include "permledger/consent.hpp"

#include "permledger/codec.hpp"
#include "permledger/error.hpp"

namespace permledger {

const char* to_string(ConsentState s) {
  return s == ConsentState::Active ? "ACTIVE" : "WITHDRAWN";
}

const char* to_string(ConsentEventKind k) {
  switch (k) {
    case ConsentEventKind::Grant: return "GRANT";
    case ConsentEventKind::Alter: return "ALTER";
    case ConsentEventKind::Withdraw: return "WITHDRAW";
  }
  return "?";
}

namespace {

void check_grantee(const std::string& grantee) {
  if (grantee != kAnyGrantee && !Address::parse(grantee)) {
    throw Error(ErrorCode::Decode, "invalid consent grantee '" + grantee + "'");
  }
}

void check_field_name(const std::string& f) {
  if (f.empty() || f.find_first_of(", \t\r\n") != std::string::npos) {
    throw Error(ErrorCode::Decode, "invalid consent field name '" + f + "'");
  }
}

}  // namespace

ConsentEvent ConsentEvent::make(const NodeIdentity& user, ConsentEventKind kind, std::string grantee,
                                FieldSet fields, std::uint64_t sequence, TimestampMs issued_at) {
  check_grantee(grantee);
  for (const auto& f : fields) check_field_name(f);
  ConsentEvent e;
  e.kind = kind;
  e.user_id = user.address().str();
  e.grantee = std::move(grantee);
  e.fields = kind == ConsentEventKind::Withdraw ? FieldSet{} : std::move(fields);
  e.sequence = sequence;
  e.issued_at = issued_at;
  e.signer_key = user.public_key();
  e.signature = user.sign(e.body());
  return e;
}

Bytes ConsentEvent::body() const {
  Writer w;
  w.str("consent-v1");
  w.u8(static_cast<std::uint8_t>(kind));
  w.str(user_id);
  w.str(grantee);
  w.u32(static_cast<std::uint32_t>(fields.size()));
  for (const auto& f : fields) w.str(f);
  w.u64(sequence);
  w.u64(issued_at);
  w.raw(signer_key);
  return w.take();
}

bool ConsentEvent::signature_valid() const {
  auto user = Address::parse(user_id);
  return user && verify_signed_by(*user, signer_key, body(), signature);
}

Bytes ConsentEvent::encode() const {
  Writer w;
  w.raw(body());
  w.raw(signature);
  return w.take();
}

ConsentEvent ConsentEvent::decode(ByteView data) {
  Reader r(data);
  if (r.str() != "consent-v1") throw Error(ErrorCode::Decode, "not a consent event");
  ConsentEvent e;
  auto kind = r.u8();
  if (kind < 1 || kind > 3) throw Error(ErrorCode::Decode, "unknown consent event kind");
  e.kind = static_cast<ConsentEventKind>(kind);
  e.user_id = r.str();
  e.grantee = r.str();
  check_grantee(e.grantee);
  auto n = r.u32();
  if (n > r.remaining() / 4) throw Error(ErrorCode::Decode, "field count exceeds input");
  std::string prev;
  for (std::uint32_t i = 0; i < n; ++i) {
    auto f = r.str();
    check_field_name(f);
    if (i > 0 && f <= prev) throw Error(ErrorCode::Decode, "consent fields not in canonical order");
    prev = f;
    e.fields.insert(std::move(f));
  }
  e.sequence = r.u64();
  e.issued_at = r.u64();
  e.signer_key = r.fixed<crypto::kKeySize>();
  e.signature = r.fixed<crypto::kSignatureSize>();
  r.expect_done();
  return e;
}

ConsentRecord transition(const std::optional<ConsentRecord>& record, const ConsentEvent& event) {
  if (!event.signature_valid()) {
    throw Error(ErrorCode::BadSignature, "consent event for " + event.user_id + " not signed by that user");
  }
  if (record && (record->user_id != event.user_id || record->grantee != event.grantee)) {
    throw Error(ErrorCode::InvalidTransition, "event does not belong to this record");
  }
  const char* current = record ? to_string(record->state) : "ABSENT";
  auto reject = [&] {
    throw Error(ErrorCode::InvalidTransition,
                std::string(to_string(event.kind)) + " not allowed in state " + current);
  };
  switch (event.kind) {
    case ConsentEventKind::Grant:
      if (record && record->state == ConsentState::Active) reject();
      break;
    case ConsentEventKind::Alter:
    case ConsentEventKind::Withdraw:
      if (!record || record->state != ConsentState::Active) reject();
      break;
  }
  const std::uint64_t expected = record ? record->version + 1 : 1;
  if (event.sequence != expected) {
    throw Error(ErrorCode::StaleEvent, "consent event sequence " + std::to_string(event.sequence) +
                                           ", expected " + std::to_string(expected));
  }
  if (record && event.issued_at < record->updated_at) {
    throw Error(ErrorCode::StaleEvent, "consent event predates the current record");
  }
  ConsentRecord next;
  next.user_id = event.user_id;
  next.grantee = event.grantee;
  next.version = expected;
  next.updated_at = event.issued_at;
  if (event.kind == ConsentEventKind::Withdraw) {
    next.state = ConsentState::Withdrawn;
  } else {
    next.state = ConsentState::Active;
    next.allowed_fields = event.fields;
  }
  return next;
}

void ConsentTable::apply(const ConsentEvent& event) {
  Key key{event.user_id, event.grantee};
  auto it = records_.find(key);
  std::optional<ConsentRecord> current;
  if (it != records_.end()) current = it->second;
  auto next = transition(current, event);
  records_[key] = std::move(next);
  trails_[event.user_id].push_back(event);
}

const ConsentRecord* ConsentTable::find(const std::string& user, const std::string& grantee) const {
  auto it = records_.find(Key{user, grantee});
  return it == records_.end() ? nullptr : &it->second;
}

std::uint64_t ConsentTable::next_sequence(const std::string& user, const std::string& grantee) const {
  const auto* r = find(user, grantee);
  return r ? r->version + 1 : 1;
}

std::vector<ConsentEvent> ConsentTable::audit_trail(const std::string& user) const {
  auto it = trails_.find(user);
  return it == trails_.end() ? std::vector<ConsentEvent>{} : it->second;
}

std::size_t ConsentTable::event_count() const {
  std::size_t n = 0;
  for (const auto& [user, events] : trails_) n += events.size();
  return n;
}

FieldSet consented_fields(const ConsentTable& table, const std::string& user, const std::string& grantee) {
  FieldSet out;
  for (const auto* r : {table.find(user, grantee), table.find(user, std::string(kAnyGrantee))}) {
    if (r == nullptr) continue;
    auto f = r->effective_fields();
    out.insert(f.begin(), f.end());
  }
  return out;
}

GateResult gate_share(const ConsentTable& table, const std::string& user, const std::string& grantee,
                      const FieldSet& fields) {
  auto covered = consented_fields(table, user, grantee);
  GateResult result;
  for (const auto& f : fields) {
    if (!covered.contains(f)) result.missing.push_back(f);
  }
  bool any_active = false;
  for (const auto* r : {table.find(user, grantee), table.find(user, std::string(kAnyGrantee))}) {
    any_active = any_active || (r != nullptr && r->state == ConsentState::Active);
  }
  result.ok = any_active && result.missing.empty();
  return result;
}

ConsentTable replay(const std::vector<ConsentEvent>& events) {
  ConsentTable t;
  for (const auto& e : events) t.apply(e);
  return t;
}

}  // namespace permledger
