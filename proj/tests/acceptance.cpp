// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "permledger/bench.hpp"
#include "permledger/codec.hpp"
#include "permledger/netsim.hpp"
#include "permledger/workspace.hpp"
#include "support.hpp"

using namespace permledger;
using testsupport::Gen;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

#define EXPECT_THAT(cond, msg)             \
  do {                                     \
    if (!(cond)) return Outcome{false, msg}; \
  } while (0)

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 1. Permission matrix after the hotel node's grant sequence.
Outcome permission_matrix() {
  auto params = ChainParams::parse(read_text(std::filesystem::path(PERMLEDGER_TEST_DATA) / "model.conf"));
  auto hotel = testsupport::identity("hotel");
  auto c = Consortium::create(params, "hotel", hotel, 1000);
  const auto travel = c.add_member("travel", testsupport::identity("travel")).address();
  const auto mall = c.add_member("mall", testsupport::identity("mall")).address();
  c.grant("hotel", travel, PermissionSet::parse("connect, send, receive, issue, create, mine, activate, admin"), 2000);
  c.grant("hotel", mall, PermissionSet::parse("connect, send, receive, issue, create, mine"), 3000);

  const std::map<std::string, bool> node2 = {{"connect", true}, {"send", true}, {"receive", true},
                                             {"issue", true},   {"create", true}, {"mine", true},
                                             {"activate", true}, {"admin", true}};
  auto node3 = node2;
  node3["admin"] = false;
  node3["activate"] = false;
  const auto& perms = c.state().permissions();
  for (auto p : kGrantablePermissions) {
    const std::string name(to_string(p));
    EXPECT_THAT(check_permission(perms, travel, p) == node2.at(name), "Node2 flag " + name + " differs");
    EXPECT_THAT(check_permission(perms, mall, p) == node3.at(name), "Node3 flag " + name + " differs");
    EXPECT_THAT(check_permission(perms, hotel.address(), p), "Node1 lacks " + name);
  }
  EXPECT_THAT(perms.effective_set(travel).to_string() == "connect,send,receive,issue,create,mine,activate,admin",
              "Node2 rendering " + perms.effective_set(travel).to_string());
  EXPECT_THAT(perms.effective_set(mall).to_string() == "connect,send,receive,issue,create,mine",
              "Node3 rendering " + perms.effective_set(mall).to_string());
  return {true, "Node2 = all 8 flags, Node3 = all but admin/activate"};
}

// 2. Handshake gating against the rule table.
Outcome handshake_gating() {
  Gen gen(2);
  std::size_t connected = 0, not_permitted = 0, bad_sig = 0, timeouts = 0;
  for (int trial = 0; trial < 200; ++trial) {
    SimNetwork net(1000 + trial, ChainParams{}, LatencyModel::uniform(85, 160));
    for (int i = 0; i < 8; ++i) net.add_node("n" + std::to_string(i + 1));
    std::vector<bool> has_connect(8, false);
    has_connect[0] = true;
    for (std::size_t i = 1; i < 8; ++i) {
      auto flags = gen.permissions() - PermissionSet{Permission::Admin, Permission::Mine};
      has_connect[i] = flags.contains(Permission::Connect);
      if (!flags.empty()) net.submit(0, GrantPayload{net.node(i).address(), flags, {}, {}});
    }
    net.produce_block();
    for (std::size_t i = 1; i < 8; ++i) net.sync_from(i, 0);

    for (int k = 0; k < 3; ++k) {
      const auto a = gen.index(8);
      auto b = gen.index(7);
      if (b >= a) ++b;
      const bool forge = gen.chance(0.2);
      const bool b_down = gen.chance(0.1);
      net.node_mut(a).forge_signatures = forge && gen.chance(0.5);
      net.node_mut(b).forge_signatures = forge && !net.node(a).forge_signatures;
      if (b_down) net.stop(b);

      int want_step = 0;
      AbortReason want = AbortReason::None;
      if (b_down) {
        want_step = 1, want = AbortReason::Timeout;
      } else if (!has_connect[a] || !has_connect[b]) {
        want_step = 2, want = AbortReason::NotPermitted;
      } else if (forge) {
        want_step = 4, want = AbortReason::BadSignature;
      }
      auto hs = net.connect(a, b);
      std::ostringstream why;
      why << "trial " << trial << " " << a << "->" << b << ": got step " << hs.step << " " << to_string(hs.reason)
          << ", expected step " << want_step << " " << to_string(want);
      EXPECT_THAT(hs.connected == (want == AbortReason::None), why.str());
      EXPECT_THAT(hs.step == want_step && hs.reason == want, why.str());
      switch (want) {
        case AbortReason::None: ++connected; break;
        case AbortReason::NotPermitted: ++not_permitted; break;
        case AbortReason::BadSignature: ++bad_sig; break;
        case AbortReason::Timeout: ++timeouts; break;
      }
      net.node_mut(a).forge_signatures = false;
      net.node_mut(b).forge_signatures = false;
      if (b_down) {
        net.start(b);
        net.sync_from(b, 0);
      }
      net.run_until_quiescent();
      for (std::size_t n = 0; n < 8; ++n) {
        if (!net.node(n).running()) continue;
        for (auto p : net.node(n).peers()) {
          EXPECT_THAT(has_connect[p] && has_connect[n], "peer list holds a node without connect");
        }
      }
    }
  }
  std::ostringstream d;
  d << "600 handshakes: " << connected << " connected, " << not_permitted << " not-permitted, " << bad_sig
    << " bad-signature, " << timeouts << " timeout";
  return {true, d.str()};
}

// 3. Latency under links ~ uniform(85, 160).
Outcome latency_reproduction() {
  int in_band = 0;
  double lo = 1e9, hi = 0;
  for (int run = 0; run < 100; ++run) {
    auto config = ScenarioConfig::for_scenario("S1");
    config.seed = 500 + run;
    config.link = LatencyModel::uniform(85, 160);
    auto result = run_scenario(config);
    EXPECT_THAT(result.samples.size() == 20, "S1 produced " + std::to_string(result.samples.size()) + " samples");
    auto s = compute_stats(result.samples);
    EXPECT_THAT(s.min >= 85 && s.max <= 160, "run " + std::to_string(run) + " sample outside [85, 160]");
    lo = std::min(lo, s.min);
    hi = std::max(hi, s.max);
    if (s.avg >= 105 && s.avg <= 140) ++in_band;
  }
  EXPECT_THAT(in_band >= 95, std::to_string(in_band) + "/100 runs with avg in [105, 140]");

  auto s3 = ScenarioConfig::for_scenario("S3");
  s3.seed = 77;
  auto r3 = run_scenario(s3);
  EXPECT_THAT(r3.samples.size() == 20, "S3 sample count");
  for (const auto& cycle : r3.cycles) {
    EXPECT_THAT(cycle.handshakes.size() == 7, "S3 observation did not reach 7 targets");
    double sum = 0;
    for (const auto& hs : cycle.handshakes) sum += hs.mean_leg_ms();
    EXPECT_THAT(std::abs(sum / 7 - cycle.sample_ms) < 1e-9, "S3 observation is not the mean over 7 targets");
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d/100 runs avg in [105,140]; sample range [%.2f, %.2f]; S3 = mean of 7", in_band, lo,
                hi);
  return {true, buf};
}

// 4. Statistics against a two-pass oracle.
Outcome statistics_oracle() {
  Gen gen(4);
  double worst = 0;
  for (int set = 0; set < 1000; ++set) {
    std::vector<double> xs(gen.between(1, 200));
    const double scale = std::pow(10.0, gen.real(-3, 6));
    const double offset = gen.real(-1, 1) * scale * 10;
    for (auto& x : xs) x = offset + gen.real(0, scale);
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(xs.size()));
    auto s = compute_stats(xs);
    auto rel = [](double got, double want, double ref) { return std::abs(got - want) / std::max(std::abs(ref), 1e-300); };
    const double e1 = rel(s.avg, mean, mean == 0 ? 1 : mean);
    // SD is compared relative to the spread scale, where a two-pass result is itself exact to ~1e-12.
    const double e2 = sd == 0 ? std::abs(s.sd) : rel(s.sd, sd, sd);
    worst = std::max({worst, e1, e2});
    EXPECT_THAT(e1 <= 1e-9 && e2 <= 1e-9, "set " + std::to_string(set) + " deviates from the oracle");
    EXPECT_THAT(s.min == *std::min_element(xs.begin(), xs.end()) && s.max == *std::max_element(xs.begin(), xs.end()),
                "min/max mismatch");
  }

  // Published S1 row: 85, 159.5 and 18 values at m18 +/- e chosen for mean 122.57 and SD 19.32.
  const double n = 20, mean = 122.57, sd = 19.32, lo = 85, hi = 159.5;
  const double m18 = (n * mean - lo - hi) / 18;
  const double rest = n * sd * sd - (lo - mean) * (lo - mean) - (hi - mean) * (hi - mean) - 18 * (m18 - mean) * (m18 - mean);
  const double e = std::sqrt(rest / 18);
  std::vector<double> xs = {lo, hi};
  for (int i = 0; i < 9; ++i) {
    xs.push_back(m18 + e);
    xs.push_back(m18 - e);
  }
  auto s = compute_stats(xs);
  LatencyReport r{"S1", s, xs};
  const auto csv = r.to_csv();
  EXPECT_THAT(csv == "scenario,N,Min,Max,Avg.,SD\nS1,20,85.00,159.50,122.57,19.32\n", "S1 row renders as " + csv);
  char buf[96];
  std::snprintf(buf, sizeof buf, "1000 sets, worst rel err %.1e; S1 row 20/85.00/159.50/122.57/19.32", worst);
  return {true, buf};
}

// 5. Per-block memory is constant.
Outcome memory_linearity() {
  auto founder = testsupport::identity("founder");
  std::vector<std::size_t> per_block;
  std::vector<std::size_t> index_bytes;
  const std::vector<std::size_t> sizes = {100, 500, 1000};
  for (auto blocks : sizes) {
    auto chain = Chain::create(ChainParams{}, founder, 0);
    while (chain.block_count() < blocks) chain.append_block({}, founder, chain.block_count());
    auto r = chain.memory_report();
    EXPECT_THAT(r.block_count == blocks, "block count");
    EXPECT_THAT(r.index_bytes == blocks * r.per_block_bytes, "index bytes not linear");
    per_block.push_back(r.per_block_bytes);
    index_bytes.push_back(r.index_bytes);
  }
  EXPECT_THAT(per_block[0] == per_block[1] && per_block[1] == per_block[2], "per-block bytes vary");
  EXPECT_THAT(per_block[0] <= 512, "per-block bytes above 512");
  EXPECT_THAT((index_bytes[2] - index_bytes[1]) == 500 * per_block[0], "marginal cost differs");
  return {true, "per_block_bytes = " + std::to_string(per_block[0]) + " at 100/500/1000 blocks"};
}

Chain five_block_chain() {
  auto a = testsupport::identity("tamper-a");
  auto b = testsupport::identity("tamper-b");
  auto chain = Chain::create(ChainParams{}, a, 10);
  Wallet wa(a, chain.state().next_nonce(a.address()));
  chain.append_block({wa.sign(GrantPayload{b.address(), PermissionSet::parse("connect,send,receive,create"), {}, {}})}, a, 20);
  chain.append_block({wa.sign(StreamCreatePayload{"hotel", false})}, a, 30);
  chain.append_block({wa.sign(StreamPublishPayload{"hotel", "k1", Bytes{'v', '1'}}),
                      wa.sign(StreamPublishPayload{"root", std::nullopt, Bytes(40, 7)})},
                     a, 40);
  Wallet wb(b, chain.state().next_nonce(b.address()));
  chain.append_block({wb.sign(StreamPublishPayload{"root", "from-b", Bytes{1, 2, 3}})}, a, 50);
  return chain;
}

Bytes snapshot_with(const Chain& chain, std::uint64_t height, const Bytes& replacement) {
  Writer w;
  w.raw(as_bytes("PLSNAP01"));
  w.u32(1);
  const auto text = chain.params().to_text();
  w.str(chain.params().protocol_tag);
  w.str(text);
  w.raw(crypto::sha256(as_bytes(text)));
  w.u32(static_cast<std::uint32_t>(chain.block_count()));
  for (std::uint64_t h = 0; h < chain.block_count(); ++h) {
    if (h == height) {
      w.bytes(replacement);
    } else {
      w.bytes(chain.block_bytes(h));
    }
  }
  return w.take();
}

// 6. Every single-byte flip of every block is rejected.
Outcome tamper_detection() {
  auto chain = five_block_chain();
  EXPECT_THAT(chain.block_count() == 5, "fixture is not 5 blocks");
  EXPECT_THAT(snapshot_with(chain, 99, {}) == chain.snapshot(), "snapshot layout drifted from the harness");
  EXPECT_THAT(!validate_chain(chain), "untampered chain fails validation");
  std::size_t flips = 0, silent = 0;
  for (std::uint64_t h = 0; h < chain.block_count(); ++h) {
    const auto view = chain.block_bytes(h);
    const Bytes original(view.begin(), view.end());
    for (std::size_t i = 0; i < original.size(); ++i) {
      for (std::uint8_t mask : {std::uint8_t{0x01}, std::uint8_t{0x80}}) {
        auto tampered = original;
        tampered[i] ^= mask;
        ++flips;
        if (!validate_snapshot(snapshot_with(chain, h, tampered))) ++silent;
      }
    }
  }
  EXPECT_THAT(silent == 0, std::to_string(silent) + " of " + std::to_string(flips) + " flips accepted");
  return {true, std::to_string(flips) + " flips over 5 blocks, 0 accepted"};
}

// 7. Replay reproduces the builder's state at every height.
Outcome catch_up_equivalence() {
  std::size_t checkpoints = 0;
  for (int w = 0; w < 50; ++w) {
    Gen gen(7000 + w);
    std::vector<NodeIdentity> ids;
    for (int i = 0; i < 5; ++i) ids.push_back(testsupport::identity("w" + std::to_string(w) + "-" + std::to_string(i)));
    auto chain = Chain::create(ChainParams{}, ids[0], 0);
    std::vector<Wallet> wallets;
    for (auto& id : ids) wallets.emplace_back(id);
    std::vector<const NodeIdentity*> miners;
    for (auto& id : ids) miners.push_back(&id);
    std::vector<Hash256> hashes = {chain.state().state_hash()};
    std::vector<std::string> streams = {"root"};

    const auto blocks = gen.between(5, 15);
    for (std::uint64_t b = 0; b < blocks; ++b) {
      std::vector<Transaction> txs;
      ChainState trial = chain.state();
      const auto count = gen.between(0, 4);
      for (std::uint64_t t = 0; t < count; ++t) {
        auto who = gen.index(ids.size());
        auto& wallet = wallets[who];
        wallet.sync_nonce(trial.next_nonce(wallet.address()));
        Payload payload;
        switch (gen.index(4)) {
          case 0:
            payload = GrantPayload{ids[gen.index(ids.size())].address(), gen.permissions() - PermissionSet{Permission::Admin}, {}, {}};
            break;
          case 1:
            payload = RevokePayload{GrantPayload{ids[gen.index(ids.size())].address(), {}, gen.permissions(), {}}};
            break;
          case 2:
            payload = StreamCreatePayload{"s" + gen.word(1, 3), gen.chance(0.5)};
            break;
          default:
            payload = StreamPublishPayload{streams[gen.index(streams.size())],
                                           gen.chance(0.7) ? std::optional<std::string>(gen.word(1, 4)) : std::nullopt,
                                           gen.bytes(gen.between(0, 64))};
        }
        auto tx = wallet.sign(payload);
        try {
          trial.apply(tx, ItemRef{chain.height() + 1, static_cast<std::uint32_t>(txs.size())}, chain.tip_timestamp());
          if (auto* sc = std::get_if<StreamCreatePayload>(&tx.payload)) streams.push_back(sc->name);
          txs.push_back(std::move(tx));
        } catch (const Error&) {
          // Invalid under the current rights; the builder drops it like a miner would.
        }
      }
      try {
        testsupport::mine(chain, std::move(txs), miners, chain.tip_timestamp() + 1000);
      } catch (const Error&) {
        break;  // every miner revoked; the chain ends here
      }
      hashes.push_back(chain.state().state_hash());
    }

    const auto snap = chain.snapshot();
    auto replay = catch_up(snap);
    EXPECT_THAT(!replay.error && replay.chain, "workload " + std::to_string(w) + " failed to replay");
    EXPECT_THAT(replay.chain->state().state_hash() == hashes.back(), "final state differs");
    auto fresh = Chain::from_genesis(ChainParams{}, chain.block_at(0));
    EXPECT_THAT(fresh.state().state_hash() == hashes[0], "genesis state differs");
    for (std::uint64_t h = 1; h < chain.block_count(); ++h) {
      fresh.accept_block(chain.block_at(h));
      EXPECT_THAT(fresh.state().state_hash() == hashes[h],
                  "workload " + std::to_string(w) + " differs at height " + std::to_string(h));
      ++checkpoints;
    }
  }
  return {true, "50 workloads, " + std::to_string(checkpoints) + " height checkpoints equal"};
}

// 8. Hybrid-encryption sharing round trip.
Outcome sharing_round_trip() {
  Gen gen(8);
  std::size_t reads = 0, denials = 0, tamper = 0;
  std::optional<Consortium> c;
  std::vector<std::string> names;
  for (int k = 0; k < 100; ++k) {
    if (k % 10 == 0) {
      c.emplace(Consortium::create(ChainParams{}, "owner", testsupport::identity("share-owner-" + std::to_string(k)), 0));
      names = {"owner"};
      for (int i = 0; i < 9; ++i) {
        auto name = "peer" + std::to_string(i);
        const auto addr = c->add_member(name, testsupport::identity(name + "-" + std::to_string(k))).address();
        c->grant("owner", addr, PermissionSet::parse("connect,send,receive"), 0);
        names.push_back(name);
      }
      for (const auto& n : names) {
        c->announce_key(n, 0);
        for (auto s : {kItemsStream, kAccessStream}) c->member(n).view.subscribe(c->state(), s);
      }
    }
    const auto plaintext = gen.bytes(gen.between(1, 64 * 1024));
    std::vector<std::string> pool(names.begin() + 1, names.end());
    std::shuffle(pool.begin(), pool.end(), gen.engine());
    pool.resize(gen.between(0, 8));
    std::vector<Address> recipients;
    for (const auto& n : pool) recipients.push_back(c->member(n).address());
    auto result = c->share_bytes("owner", plaintext, recipients, 0);
    EXPECT_THAT(result.recipients.size() == recipients.size() + 1, "owner is not an implicit recipient");

    for (const auto& n : names) {
      const auto& m = c->member(n);
      const bool allowed = n == "owner" || std::find(pool.begin(), pool.end(), n) != pool.end();
      try {
        auto got = read_shared(m.wallet.identity(), c->state(), m.view, result.item_id);
        EXPECT_THAT(allowed, n + " read an item it was not given");
        EXPECT_THAT(got == plaintext, n + " decrypted different bytes");
        ++reads;
      } catch (const Error& e) {
        EXPECT_THAT(!allowed && e.code() == ErrorCode::AccessDenied, n + ": " + e.what());
        ++denials;
      }
    }

    const auto& owner = c->member("owner");
    auto envelopes = owner.view.get_items(c->state(), kItemsStream, ItemFilter{result.item_id, std::nullopt});
    auto entries = owner.view.get_items(c->state(), kAccessStream, ItemFilter{result.item_id, std::nullopt});
    auto envelope = EnvelopeItem::decode(envelopes.front().data);
    AccessEntry mine;
    for (const auto& e : entries) {
      auto a = AccessEntry::decode(e.data);
      if (a.recipient == owner.address()) mine = a;
    }
    const auto key = unwrap_item_key(mine, owner.wallet.identity());
    auto flipped = envelope;
    flipped.ciphertext[gen.index(flipped.ciphertext.size())] ^= static_cast<std::uint8_t>(1 + gen.index(255));
    try {
      open_item(flipped, key);
      return {false, "tampered ciphertext decrypted"};
    } catch (const Error& e) {
      EXPECT_THAT(e.code() == ErrorCode::CorruptEnvelope, std::string("tamper gave ") + e.what());
    }
    flipped.item_id = EnvelopeItem::compute_item_id(flipped.ciphertext);
    try {
      open_item(flipped, key);
      return {false, "tampered ciphertext with matching digest decrypted"};
    } catch (const Error& e) {
      EXPECT_THAT(e.code() == ErrorCode::CorruptEnvelope, std::string("tamper gave ") + e.what());
    }
    auto bad_wrap = mine;
    bad_wrap.wrapped_key[gen.index(bad_wrap.wrapped_key.size())] ^= 0x40;
    try {
      unwrap_item_key(bad_wrap, owner.wallet.identity());
      return {false, "tampered wrapped key unwrapped"};
    } catch (const Error& e) {
      EXPECT_THAT(e.code() == ErrorCode::CorruptEnvelope, std::string("wrap tamper gave ") + e.what());
    }
    ++tamper;

    const auto snap = c->chain().snapshot();
    EXPECT_THAT(!contains_subsequence(snap, plaintext), "plaintext found in chain bytes");
    if (plaintext.size() >= 32) {
      for (int probe = 0; probe < 4; ++probe) {
        auto at = gen.index(plaintext.size() - 31);
        EXPECT_THAT(!contains_subsequence(snap, ByteView(plaintext).subspan(at, 32)), "plaintext window found in chain bytes");
      }
    }
    EXPECT_THAT(!contains_subsequence(snap, key), "raw item key found in chain bytes");
  }
  return {true, std::to_string(reads) + " reads exact, " + std::to_string(denials) + " denials, " +
                    std::to_string(tamper) + " cases tamper-checked, no plaintext or key on chain"};
}

// 9. Consent state machine and post-withdrawal gating.
Outcome consent_fsm() {
  auto user = testsupport::identity("fsm-user");
  const auto grantee = testsupport::identity("fsm-grantee").address().str();
  const std::vector<std::optional<ConsentState>> states = {std::nullopt, ConsentState::Active, ConsentState::Withdrawn};
  const std::vector<ConsentEventKind> events = {ConsentEventKind::Grant, ConsentEventKind::Alter, ConsentEventKind::Withdraw};
  int cells = 0;
  for (const auto& from : states) {
    for (auto kind : events) {
      std::optional<ConsentRecord> rec;
      if (from) {
        rec = ConsentRecord{user.address().str(), grantee, {"name"}, *from, 2, 10};
        if (*from == ConsentState::Withdrawn) rec->allowed_fields.clear();
      }
      const auto next_seq = rec ? rec->version + 1 : 1;
      auto ev = ConsentEvent::make(user, kind, grantee, {"nationality"}, next_seq, 20);
      std::optional<ConsentState> expected;
      if (kind == ConsentEventKind::Grant && (!from || *from == ConsentState::Withdrawn)) expected = ConsentState::Active;
      if (kind == ConsentEventKind::Alter && from == ConsentState::Active) expected = ConsentState::Active;
      if (kind == ConsentEventKind::Withdraw && from == ConsentState::Active) expected = ConsentState::Withdrawn;
      const std::string cell = std::string(from ? to_string(*from) : "absent") + " + " + to_string(kind);
      try {
        auto out = transition(rec, ev);
        EXPECT_THAT(expected && out.state == *expected, cell + " should be rejected");
        EXPECT_THAT(out.version == next_seq, cell + " version did not advance");
        const FieldSet want = *expected == ConsentState::Active ? FieldSet{"nationality"} : FieldSet{};
        EXPECT_THAT(out.effective_fields() == want, cell + " fields wrong");
      } catch (const Error& e) {
        EXPECT_THAT(!expected && e.code() == ErrorCode::InvalidTransition, cell + ": " + e.what());
      }
      ++cells;
    }
  }

  Gen gen(9);
  std::size_t denied = 0, other_shares = 0;
  for (int w = 0; w < 50; ++w) {
    auto c = Consortium::create(ChainParams{}, "hotel", testsupport::identity("c9-hotel-" + std::to_string(w)), 0);
    std::vector<std::string> partners = {"travel", "mall", "tour"};
    for (const auto& p : partners) {
      const auto a = c.add_member(p, testsupport::identity("c9-" + p + std::to_string(w))).address();
      c.grant("hotel", a, PermissionSet::parse("connect,send,receive"), 0);
    }
    c.add_member("alice", testsupport::identity("c9-alice-" + std::to_string(w)));
    for (const auto& n : {"hotel", "travel", "mall", "tour"}) c.announce_key(n, 0);
    const auto uid = c.member("alice").address().str();
    c.member("hotel").repo.ingest(R"({"user_id":")" + uid +
                                  R"(","name":"Alice","nationality":"CA","contact_number":"+1 306 555 0100","purpose_of_visit":"tour","stay_from":"2020-01-02","stay_to":"2020-01-05"})");
    const auto victim = partners[gen.index(partners.size())];
    const auto victim_addr = c.member(victim).address();
    for (const auto& p : partners) {
      c.consent("hotel", "alice", ConsentEventKind::Grant, c.member(p).address().str(), {"name", "nationality"}, 0);
    }
    c.share_profile("hotel", uid, std::vector<Address>{victim_addr}, 0);
    c.consent("hotel", "alice", ConsentEventKind::Withdraw, victim_addr.str(), {}, 0);
    const auto withdrawn_at = c.chain().height();

    const auto steps = gen.between(3, 10);
    for (std::uint64_t s = 0; s < steps; ++s) {
      std::vector<Address> to;
      for (const auto& p : partners) {
        if (gen.chance(0.5)) to.push_back(c.member(p).address());
      }
      if (to.empty()) to.push_back(victim_addr);
      const bool includes_victim = std::find(to.begin(), to.end(), victim_addr) != to.end();
      switch (gen.index(3)) {
        case 0:
        case 1:
          try {
            c.share_profile("hotel", uid, to, 0);
            EXPECT_THAT(!includes_victim, "share to a withdrawn grantee succeeded");
            ++other_shares;
          } catch (const ConsentDeniedError& e) {
            EXPECT_THAT(includes_victim, std::string("unexpected denial: ") + e.what());
            ++denied;
          }
          break;
        default: {
          const auto& p = partners[gen.index(partners.size())];
          if (p == victim) break;
          const auto* rec = c.state().consent().find(uid, c.member(p).address().str());
          const auto kind = rec && rec->state == ConsentState::Active ? ConsentEventKind::Alter : ConsentEventKind::Grant;
          c.consent("hotel", "alice", kind, c.member(p).address().str(),
                    gen.chance(0.5) ? FieldSet{"name"} : FieldSet{"name", "nationality", "stay_from"}, 0);
        }
      }
    }
    const auto* access = c.state().find_stream(kAccessStream);
    for (const auto& item : access->items) {
      if (item.ref.height <= withdrawn_at) continue;
      EXPECT_THAT(AccessEntry::decode(item.data).recipient != victim_addr,
                  "access entry for a withdrawn grantee published after withdrawal");
    }
  }
  return {true, std::to_string(cells) + " table cells; 50 workloads, " + std::to_string(denied) + " denied, " +
                    std::to_string(other_shares) + " permitted shares, no post-withdrawal entry"};
}

// 10. Scripted three-enterprise run through the persisted chain directory.
Outcome golden_trace() {
  testsupport::TempDir dir("golden");
  const auto chain_dir = dir.path() / "chain";
  const auto params_text = read_text(std::filesystem::path(PERMLEDGER_TEST_DATA) / "model.conf");
  auto ws = Workspace::create(chain_dir, params_text, "hotel", std::string("hotel-seed"));
  for (auto [name, seed] : {std::pair{"travel", "travel-seed"}, std::pair{"mall", "mall-seed"}, std::pair{"alice", "alice-seed"}}) {
    ws.create_identity(name, std::string(seed));
  }
  ws.grant("hotel", "travel", "connect,send,receive,issue,create,mine,activate,admin", false);
  ws.grant("hotel", "mall", "connect,send,receive,issue,create,mine", false);
  ws.save();

  auto step = [&](const std::function<void(Workspace&)>& f) {
    auto w = Workspace::open(chain_dir);
    f(w);
    w.save();
  };
  for (const char* n : {"hotel", "travel", "mall"}) step([&](Workspace& w) { w.announce_key(n); });
  const auto uid = ws.consortium().member("alice").address().str();
  const std::string profile = R"({"user_id":")" + uid +
                              R"(","name":"  Alice Smith\u0000 ","nationality":"Canadian","contact_number":"+1 306-555-0199",)"
                              R"("purpose_of_visit":"Conference","stay_from":"2019-06-10","stay_to":"2019-06-14"})";
  step([&](Workspace& w) { w.ingest("hotel", profile); });
  for (const char* g : {"travel", "mall"}) {
    step([&](Workspace& w) { w.consent("hotel", "grant", "alice", g, "name,nationality"); });
  }
  std::string item_id;
  step([&](Workspace& w) {
    auto out = nlohmann::json::parse(w.share("hotel", "alice", {"travel", "mall"}));
    item_id = out.at("item_id").get<std::string>();
  });
  for (const char* n : {"travel", "mall"}) {
    step([&](Workspace& w) {
      w.subscribe(n, "items");
      w.subscribe(n, "access");
      w.import_item(n, item_id);
    });
  }

  auto final_ws = Workspace::open(chain_dir);
  const auto* source = final_ws.consortium().member("hotel").repo.find(uid);
  EXPECT_THAT(source && source->profile.name == "Alice Smith", "ingested name not sanitized");
  for (const char* n : {"travel", "mall"}) {
    const auto* rec = final_ws.consortium().member(n).repo.find(uid);
    EXPECT_THAT(rec != nullptr, std::string(n) + " has no imported record");
    EXPECT_THAT(rec->profile.present_fields() == FieldSet({"name", "nationality"}),
                std::string(n) + " holds fields beyond the consented two");
    EXPECT_THAT(rec->profile.name == source->profile.name && rec->profile.nationality == source->profile.nationality,
                std::string(n) + " values differ from the source");
    EXPECT_THAT(rec->provenance.kind == Provenance::Kind::Imported && rec->provenance.item_id == item_id &&
                    rec->provenance.source == final_ws.consortium().member("hotel").address(),
                std::string(n) + " provenance wrong");
  }
  EXPECT_THAT(!validate_chain(final_ws.consortium().chain()), "final chain does not validate");
  return {true, "travel and mall hold exactly {name, nationality} equal to hotel's record"};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  Outcome (*run)();
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "permission matrix", 1, permission_matrix},
      {2, "handshake gating", 5, handshake_gating},
      {3, "latency reproduction", 10, latency_reproduction},
      {4, "statistics oracle", 2, statistics_oracle},
      {5, "memory linearity", 5, memory_linearity},
      {6, "tamper detection", 30, tamper_detection},
      {7, "catch-up equivalence", 20, catch_up_equivalence},
      {8, "sharing round-trip", 30, sharing_round_trip},
      {9, "consent FSM", 10, consent_fsm},
      {10, "end-to-end golden trace", 5, golden_trace},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (out.pass && secs > c.limit_s) {
      out.pass = false;
      out.detail += " (over the time limit)";
    }
    std::printf("criterion %2d %-24s %s  %.2fs/%.0fs  %s\n", c.id, c.name, out.pass ? "PASS" : "FAIL", secs, c.limit_s,
                out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
