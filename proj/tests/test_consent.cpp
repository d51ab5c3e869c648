#include "doctest.h"

#include "permledger/consent.hpp"
#include "permledger/consortium.hpp"
#include "support.hpp"

using namespace permledger;
using testsupport::Gen;

namespace {

const NodeIdentity& user() {
  static const auto id = testsupport::identity("consent-user");
  return id;
}

ConsentEvent ev(ConsentEventKind k, std::string grantee, FieldSet f, std::uint64_t seq,
                const NodeIdentity& signer = user()) {
  return ConsentEvent::make(signer, k, std::move(grantee), std::move(f), seq, 100 * seq);
}

std::string addr(const std::string& label) { return testsupport::identity("consent-" + label).address().str(); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Usage;
}

}  // namespace

TEST_CASE("grant, alter and withdraw follow the state machine") {
  ConsentTable t;
  const auto uid = user().address().str();
  t.apply(ev(ConsentEventKind::Grant, addr("travel"), {"name", "nationality"}, 1));
  CHECK(t.find(uid, addr("travel"))->state == ConsentState::Active);
  CHECK(consented_fields(t, uid, addr("travel")) == FieldSet{"name", "nationality"});
  t.apply(ev(ConsentEventKind::Alter, addr("travel"), {"name"}, 2));
  CHECK(consented_fields(t, uid, addr("travel")) == FieldSet{"name"});
  t.apply(ev(ConsentEventKind::Withdraw, addr("travel"), {}, 3));
  CHECK(t.find(uid, addr("travel"))->state == ConsentState::Withdrawn);
  CHECK(consented_fields(t, uid, addr("travel")).empty());
  CHECK(code_of([&] { t.apply(ev(ConsentEventKind::Alter, addr("travel"), {"name"}, 4)); }) == ErrorCode::InvalidTransition);
  CHECK(code_of([&] { t.apply(ev(ConsentEventKind::Withdraw, addr("travel"), {}, 4)); }) == ErrorCode::InvalidTransition);
  t.apply(ev(ConsentEventKind::Grant, addr("travel"), {"stay_from"}, 4));
  CHECK(consented_fields(t, uid, addr("travel")) == FieldSet{"stay_from"});
  CHECK(t.find(uid, addr("travel"))->version == 4);
  CHECK(t.audit_trail(uid).size() == 4);
}

TEST_CASE("replayed and out-of-order events are stale") {
  ConsentTable t;
  auto first = ev(ConsentEventKind::Grant, addr("mall"), {"name"}, 1);
  t.apply(first);
  auto withdraw = ev(ConsentEventKind::Withdraw, addr("mall"), {}, 2);
  t.apply(withdraw);
  CHECK(code_of([&] { t.apply(first); }) == ErrorCode::StaleEvent);
  CHECK(code_of([&] { t.apply(ev(ConsentEventKind::Grant, addr("mall"), {"name"}, 7)); }) == ErrorCode::StaleEvent);
  CHECK(t.find(user().address().str(), addr("mall"))->state == ConsentState::Withdrawn);
  CHECK(t.event_count() == 2);
}

TEST_CASE("only the user's own key can change the user's consent") {
  ConsentTable t;
  auto mallory = testsupport::identity("mallory");
  auto forged = ev(ConsentEventKind::Grant, addr("mall"), {"name"}, 1, mallory);
  forged.user_id = user().address().str();
  CHECK(code_of([&] { t.apply(forged); }) == ErrorCode::BadSignature);
  auto tampered = ev(ConsentEventKind::Grant, addr("mall"), {"name"}, 1);
  tampered.fields.insert("contact_number");
  CHECK(code_of([&] { t.apply(tampered); }) == ErrorCode::BadSignature);
  CHECK(t.records().empty());
  CHECK(t.event_count() == 0);
}

TEST_CASE("events encode and decode losslessly") {
  auto e = ev(ConsentEventKind::Alter, "*", {"a", "b"}, 3);
  CHECK(ConsentEvent::decode(e.encode()) == e);
  CHECK(e.signature_valid());
  CHECK_THROWS_AS(ConsentEvent::decode(Bytes{9, 9}), Error);
}

TEST_CASE("the gate matches a set-inclusion oracle over specific and wildcard records") {
  Gen gen(51);
  const std::vector<std::string> fields = {"name", "nationality", "contact_number", "stay_from"};
  const std::vector<std::string> grantees = {addr("travel"), addr("mall"), "*"};
  auto random_fields = [&] {
    FieldSet f;
    for (const auto& x : fields) {
      if (gen.chance(0.5)) f.insert(x);
    }
    return f;
  };
  for (int run = 0; run < 30; ++run) {
    ConsentTable t;
    std::map<std::string, std::pair<bool, FieldSet>> model;
    std::map<std::string, std::uint64_t> seq;
    for (int step = 0; step < 40; ++step) {
      const auto& g = grantees[gen.index(grantees.size())];
      const auto kind = static_cast<ConsentEventKind>(1 + gen.index(3));
      auto f = random_fields();
      const bool has = model.contains(g);
      const bool active = has && model[g].first;
      const bool legal = (kind == ConsentEventKind::Grant && !active) || (kind != ConsentEventKind::Grant && active);
      try {
        t.apply(ev(kind, g, f, seq[g] + 1));
        REQUIRE(legal);
        seq[g] += 1;
        model[g] = kind == ConsentEventKind::Withdraw ? std::pair{false, FieldSet{}} : std::pair{true, f};
      } catch (const Error& e) {
        REQUIRE_FALSE(legal);
        CHECK(e.code() == ErrorCode::InvalidTransition);
      }
      for (const auto& who : {addr("travel"), addr("mall")}) {
        FieldSet allowed;
        for (const auto& key : {std::string(who), std::string("*")}) {
          if (model.contains(key) && model[key].first) allowed.insert(model[key].second.begin(), model[key].second.end());
        }
        const auto req = random_fields();
        std::vector<std::string> missing;
        for (const auto& x : req) {
          if (!allowed.contains(x)) missing.push_back(x);
        }
        const bool any_active = (model.contains(who) && model[who].first) || (model.contains("*") && model["*"].first);
        auto got = gate_share(t, user().address().str(), who, req);
        REQUIRE(got.ok == (any_active && missing.empty()));
        CHECK(got.missing == missing);
      }
    }
    CHECK(replay(t.audit_trail(user().address().str())) == t);
  }
}

TEST_CASE("consent events travel on the chain and deny withdrawn recipients") {
  auto c = Consortium::create(ChainParams{}, "hotel", testsupport::identity("cc-hotel"), 0);
  auto travel = c.add_member("travel", testsupport::identity("cc-travel")).address();
  c.grant("hotel", travel, PermissionSet::parse("connect,send,receive"), 0);
  c.add_member("alice", testsupport::identity("cc-alice"));
  c.announce_key("hotel", 0);
  c.announce_key("travel", 0);
  const auto uid = c.member("alice").address().str();
  c.member("hotel").repo.ingest(R"({"user_id":")" + uid + R"(","name":"Alice","nationality":"NP"})");
  c.consent("hotel", "alice", ConsentEventKind::Grant, travel.str(), {"name"}, 0);
  CHECK(c.state().consent().find(uid, travel.str())->version == 1);
  auto share = c.share_profile("hotel", uid, std::vector<Address>{travel}, 0);
  c.member("travel").view.subscribe(c.state(), kItemsStream);
  c.member("travel").view.subscribe(c.state(), kAccessStream);
  const auto& got = c.import_profile("travel", share.item_id);
  CHECK(got.present_fields() == FieldSet{"name"});
  c.consent("hotel", "alice", ConsentEventKind::Withdraw, travel.str(), {}, 0);
  CHECK_THROWS_AS(c.share_profile("hotel", uid, std::vector<Address>{travel}, 0), ConsentDeniedError);
  CHECK(code_of([&] { c.consent("hotel", "alice", ConsentEventKind::Alter, travel.str(), {"name"}, 0); }) ==
        ErrorCode::InvalidTransition);

  auto snap = c.chain().snapshot();
  auto replayed = catch_up(snap);
  REQUIRE(replayed.chain);
  CHECK(replayed.chain->state().consent() == c.state().consent());
  CHECK(c.state().consent().audit_trail(uid).size() == 2);
}
