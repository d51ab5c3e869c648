#include "permledger/netsim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>

#include "permledger/codec.hpp"
#include "permledger/error.hpp"

namespace permledger {

namespace {

constexpr std::uint16_t kBasePort = 7447;
constexpr double kTimeoutFactor = 10.0;
constexpr std::size_t kMaxEvents = 50'000'000;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::Config, what); }

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(std::string_view key, std::string_view text) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    config_error("invalid number for " + std::string(key) + ": '" + std::string(text) + "'");
  }
  return v;
}

std::uint64_t parse_count(std::string_view key, std::string_view text) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    config_error("invalid integer for " + std::string(key) + ": '" + std::string(text) + "'");
  }
  return v;
}

std::string format_ms(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string format_plain(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

Bytes challenge_message(ByteView challenge, const Address& signer, const Address& verifier) {
  Writer w;
  w.str("handshake-v1");
  w.bytes(challenge);
  w.str(signer.str());
  w.str(verifier.str());
  return w.take();
}

}  // namespace

LatencyModel LatencyModel::fixed(double ms) {
  if (!(ms >= 0) || !std::isfinite(ms)) config_error("latency must be a non-negative number");
  return {Kind::Fixed, ms, ms};
}

LatencyModel LatencyModel::uniform(double lo, double hi) {
  if (!(lo >= 0) || !(hi >= lo) || !std::isfinite(hi)) config_error("uniform latency needs 0 <= min <= max");
  return {Kind::Uniform, lo, hi};
}

LatencyModel LatencyModel::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string kind;
  std::vector<std::string> args;
  in >> kind;
  for (std::string a; in >> a;) args.push_back(a);
  if (kind == "fixed" && args.size() == 1) return fixed(parse_number("link", args[0]));
  if (kind == "uniform" && args.size() == 2) {
    return uniform(parse_number("link", args[0]), parse_number("link", args[1]));
  }
  config_error("link must be 'fixed <ms>' or 'uniform <min> <max>', got '" + std::string(text) + "'");
}

double LatencyModel::sample(std::mt19937_64& rng) const {
  if (kind == Kind::Fixed) return min_ms;
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return min_ms + u * (max_ms - min_ms);
}

std::string LatencyModel::to_string() const {
  if (kind == Kind::Fixed) return "fixed " + format_plain(min_ms);
  return "uniform " + format_plain(min_ms) + " " + format_plain(max_ms);
}

const char* to_string(AbortReason r) {
  switch (r) {
    case AbortReason::None: return "none";
    case AbortReason::NotPermitted: return "not-permitted";
    case AbortReason::BadSignature: return "bad-signature";
    case AbortReason::Timeout: return "timeout";
  }
  return "?";
}

std::string TraceEvent::to_line() const {
  return format_ms(at_ms) + "\t" + kind + "\t" + node + "\t" + peer + "\t" + detail;
}

std::string export_trace(const std::vector<TraceEvent>& trace) {
  std::string out;
  for (const auto& e : trace) out += e.to_line() + "\n";
  return out;
}

std::string SimNode::endpoint() const {
  return chain_name_ + "@" + host_ + ":" + std::to_string(port_);
}

SimNetwork::SimNetwork(std::uint64_t seed, ChainParams params, LatencyModel default_link)
    : rng_(seed), params_(std::move(params)), default_link_(default_link), seed_(seed) {
  params_.validate();
}

std::size_t SimNetwork::add_node(std::string name) {
  const auto index = nodes_.size();
  auto id = NodeIdentity::generate(as_bytes("sim|" + std::to_string(seed_) + "|" + name));
  SimNode node(std::move(name), "10.0.0." + std::to_string(index + 1), kBasePort, std::move(id));
  node.chain_name_ = params_.chain_name;
  if (index == 0) {
    node.chain_.emplace(Chain::create(params_, node.identity(), static_cast<TimestampMs>(now_)));
  } else {
    node.chain_.emplace(Chain::from_genesis(params_, nodes_.front().persisted_genesis()));
  }
  node.wallet_.sync_nonce(node.chain_->state().next_nonce(node.address()));
  nodes_.push_back(std::move(node));
  record("node.add", index, std::nullopt, nodes_.back().endpoint() + " " + nodes_.back().address().str());
  return index;
}

Block SimNode::persisted_genesis() const {
  if (chain_) return chain_->block_at(0);
  auto r = catch_up(persisted_);
  if (!r.chain) throw Error(ErrorCode::NotFound, "founder has no genesis");
  return r.chain->block_at(0);
}

void SimNetwork::set_link(std::size_t a, std::size_t b, LatencyModel model) {
  links_[{std::min(a, b), std::max(a, b)}] = model;
}

const LatencyModel& SimNetwork::link(std::size_t a, std::size_t b) const {
  auto it = links_.find({std::min(a, b), std::max(a, b)});
  return it == links_.end() ? default_link_ : it->second;
}

void SimNetwork::schedule(double delay, std::function<void()> fire) {
  queue_.push(Event{now_ + delay, seq_++, std::move(fire)});
}

void SimNetwork::record(std::string kind, std::size_t node, std::optional<std::size_t> peer, std::string detail) {
  trace_.push_back(TraceEvent{now_, std::move(kind), nodes_.at(node).name(),
                              peer ? nodes_.at(*peer).name() : std::string{}, std::move(detail)});
}

double SimNetwork::send(std::size_t from, std::size_t to, std::string kind, std::function<void()> on_arrival) {
  const double delay = link(from, to).sample(rng_);
  record("send", from, to, kind + " " + format_ms(delay));
  schedule(delay, [this, from, to, kind = std::move(kind), on_arrival = std::move(on_arrival)] {
    if (!nodes_[to].running_) {
      record("drop", to, from, kind);
      return;
    }
    record("recv", to, from, kind);
    on_arrival();
  });
  return delay;
}

std::size_t SimNetwork::index_of(const Address& a) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].address() == a) return i;
  }
  throw Error(ErrorCode::NotFound, "no simulated node with address " + a.str());
}

struct SimNetwork::Handshake {
  std::size_t a = 0;
  std::size_t b = 0;
  Bytes challenge_a;
  Bytes challenge_b;
  int stage = 1;
  bool done = false;
  HandshakeResult result;
};

HandshakeResult SimNetwork::connect(std::size_t a, std::size_t b) {
  if (!nodes_.at(a).running_) throw Error(ErrorCode::Usage, nodes_[a].name() + " is not running");
  if (a == b) throw Error(ErrorCode::Usage, "cannot connect a node to itself");
  auto hs = std::make_shared<Handshake>();
  hs->a = a;
  hs->b = b;
  for (int i = 0; i < 4; ++i) {
    auto word = rng_();
    for (int k = 0; k < 8; ++k) hs->challenge_a.push_back(static_cast<std::uint8_t>(word >> (8 * k)));
  }
  const double timeout = kTimeoutFactor * link(a, b).max_ms;
  record("handshake.start", a, b);

  auto finish = [this, hs](int step, AbortReason reason) {
    if (hs->done) return;
    hs->done = true;
    hs->result.connected = reason == AbortReason::None;
    hs->result.step = step;
    hs->result.reason = reason;
    record(hs->result.connected ? "handshake.connected" : "handshake.abort", hs->a, hs->b,
           hs->result.connected ? format_ms(hs->result.round_trip_ms)
                                : "step " + std::to_string(step) + " " + to_string(reason));
  };
  auto arm_timeout = [this, hs, timeout, finish](int stage) {
    schedule(timeout, [hs, stage, finish] {
      if (!hs->done && hs->stage == stage) finish(stage, AbortReason::Timeout);
    });
  };
  auto sign_challenge = [this](std::size_t signer, ByteView challenge, std::size_t verifier) {
    auto msg = challenge_message(challenge, nodes_[signer].address(), nodes_[verifier].address());
    if (nodes_[signer].forge_signatures) {
      return NodeIdentity::generate(as_bytes("forged|" + nodes_[signer].name())).sign(msg);
    }
    return nodes_[signer].identity().sign(msg);
  };
  auto permitted = [this](std::size_t judge, std::size_t subject) {
    return check_permission(nodes_[judge].chain_->state().permissions(), nodes_[subject].address(),
                            Permission::Connect);
  };

  // Leg 4: b acknowledges; both sides record the peering and sync.
  auto on_ack = [this, hs, finish] {
    if (hs->done) return;
    nodes_[hs->a].peers_.insert(hs->b);
    nodes_[hs->b].peers_.insert(hs->a);
    finish(0, AbortReason::None);
    request_sync(hs->a, hs->b);
    request_sync(hs->b, hs->a);
  };
  // Leg 3 arrives at b: verify a's signature over b's challenge.
  auto on_response = [this, hs, finish, sign_challenge, arm_timeout, on_ack](crypto::Signature sig_a) {
    if (hs->done) return;
    auto msg = challenge_message(hs->challenge_b, nodes_[hs->a].address(), nodes_[hs->b].address());
    if (!verify_signed_by(nodes_[hs->a].address(), nodes_[hs->a].identity().public_key(), msg, sig_a)) {
      finish(4, AbortReason::BadSignature);
      return;
    }
    hs->stage = 4;
    hs->result.round_trip_ms += send(hs->b, hs->a, "handshake.ack", on_ack);
    hs->result.legs++;
    arm_timeout(4);
  };
  // Leg 2 arrives at a: check b on a's permitted list, verify b's signature.
  auto on_challenge = [this, hs, finish, sign_challenge, arm_timeout, permitted, on_response](
                          crypto::Signature sig_b) {
    if (hs->done) return;
    if (!permitted(hs->a, hs->b)) {
      finish(2, AbortReason::NotPermitted);
      return;
    }
    auto msg = challenge_message(hs->challenge_a, nodes_[hs->b].address(), nodes_[hs->a].address());
    if (!verify_signed_by(nodes_[hs->b].address(), nodes_[hs->b].identity().public_key(), msg, sig_b)) {
      finish(4, AbortReason::BadSignature);
      return;
    }
    auto sig_a = sign_challenge(hs->a, hs->challenge_b, hs->b);
    hs->stage = 3;
    hs->result.round_trip_ms += send(hs->a, hs->b, "handshake.response", [on_response, sig_a] { on_response(sig_a); });
    hs->result.legs++;
    arm_timeout(3);
  };
  // Leg 1 arrives at b: check a on b's permitted list, answer with a signature
  // over a's challenge plus b's own challenge.
  auto on_hello = [this, hs, finish, sign_challenge, arm_timeout, permitted, on_challenge] {
    if (hs->done) return;
    if (!permitted(hs->b, hs->a)) {
      finish(2, AbortReason::NotPermitted);
      return;
    }
  for (int i = 0; i < 4; ++i) {
      auto word = rng_();
      for (int k = 0; k < 8; ++k) hs->challenge_b.push_back(static_cast<std::uint8_t>(word >> (8 * k)));
    }
    auto sig_b = sign_challenge(hs->b, hs->challenge_a, hs->a);
    hs->stage = 2;
    hs->result.round_trip_ms += send(hs->b, hs->a, "handshake.challenge", [on_challenge, sig_b] { on_challenge(sig_b); });
    hs->result.legs++;
    arm_timeout(2);
  };

  hs->result.round_trip_ms += send(a, b, "handshake.hello", on_hello);
  hs->result.legs++;
  arm_timeout(1);

  std::size_t fired = 0;
  while (!hs->done && !queue_.empty()) {
    auto ev = queue_.top();
    queue_.pop();
    now_ = std::max(now_, ev.at);
    ev.fire();
    if (++fired > kMaxEvents) throw Error(ErrorCode::Validation, "simulation did not settle");
  }
  return hs->result;
}

void SimNetwork::disconnect(std::size_t a, std::size_t b) {
  if (nodes_.at(a).peers_.erase(b) + nodes_.at(b).peers_.erase(a) > 0) record("disconnect", a, b);
}

void SimNetwork::gossip(std::size_t node, std::optional<std::size_t> except,
                        const std::function<void(std::size_t)>& send_to) {
  for (auto p : nodes_[node].peers_) {
    if (except && p == *except) continue;
    send_to(p);
  }
}

Transaction SimNetwork::submit(std::size_t node, Payload payload) {
  auto& n = nodes_.at(node);
  if (!n.running_) throw Error(ErrorCode::Usage, n.name() + " is not running");
  n.wallet_.sync_nonce(n.chain_->state().next_nonce(n.address()));
  auto tx = n.wallet_.sign(std::move(payload));
  n.seen_txs_.insert(tx.tx_id);
  n.mempool_.push_back(tx);
  record("tx.submit", node, std::nullopt, to_hex(tx.tx_id).substr(0, 16));
  gossip(node, std::nullopt, [&](std::size_t p) {
    send(node, p, "tx", [this, p, node, tx] { receive_tx(p, node, tx); });
  });
  return tx;
}

void SimNetwork::receive_tx(std::size_t node, std::size_t from, const Transaction& tx) {
  auto& n = nodes_[node];
  if (!n.peers_.contains(from) || !n.seen_txs_.insert(tx.tx_id).second) return;
  if (!tx.id_matches() || !tx.signature_valid()) {
    record("tx.reject", node, from, to_hex(tx.tx_id).substr(0, 16));
    return;
  }
  n.mempool_.push_back(tx);
  gossip(node, from, [&](std::size_t p) {
    send(node, p, "tx", [this, p, node, tx] { receive_tx(p, node, tx); });
  });
}

void SimNetwork::grant(std::size_t admin, std::size_t target, PermissionSet flags) {
  submit(admin, GrantPayload{nodes_.at(target).address(), flags, {}, {}});
  run_until_quiescent();
  produce_block();
  run_until_quiescent();
}

Block SimNetwork::produce_block() {
  std::optional<std::size_t> ref;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!nodes_[i].running_) continue;
    if (!ref || nodes_[i].chain_->height() > nodes_[*ref].chain_->height()) ref = i;
  }
  if (!ref) throw Error(ErrorCode::NotPermittedMiner, "no node is running");
  const auto next = nodes_[*ref].chain_->height() + 1;
  auto scheduled = nodes_[*ref].chain_->scheduled_miner(next);
  if (!scheduled) throw Error(ErrorCode::NotPermittedMiner, "no address holds mine");
  const auto m = index_of(*scheduled);
  auto& miner = nodes_[m];
  if (!miner.running_) throw Error(ErrorCode::NotPermittedMiner, miner.name() + " is scheduled but offline");
  if (miner.chain_->height() + 1 != next) {
    throw Error(ErrorCode::NotPermittedMiner, miner.name() + " is scheduled but not at the tip");
  }

  // Per signer, order by nonce while keeping the arrival slots.
  auto pool = miner.mempool_;
  std::map<Address, std::vector<std::size_t>> slots;
  for (std::size_t i = 0; i < pool.size(); ++i) slots[pool[i].signer].push_back(i);
  for (auto& [signer, idx] : slots) {
    std::vector<Transaction> mine;
    for (auto i : idx) mine.push_back(pool[i]);
    std::stable_sort(mine.begin(), mine.end(), [](const auto& x, const auto& y) { return x.nonce < y.nonce; });
    for (std::size_t k = 0; k < idx.size(); ++k) pool[idx[k]] = std::move(mine[k]);
  }

  const auto timestamp = std::max(static_cast<TimestampMs>(now_), miner.chain_->tip_timestamp());
  ChainState trial = miner.chain_->state();
  std::vector<Transaction> txs;
  for (auto& tx : pool) {
    try {
      trial.apply(tx, ItemRef{next, static_cast<std::uint32_t>(txs.size())}, timestamp);
      txs.push_back(std::move(tx));
    } catch (const Error& e) {
      record("tx.drop", m, std::nullopt, e.what());
    }
  }
  auto block = miner.chain_->append_block(std::move(txs), miner.identity(), static_cast<TimestampMs>(now_));
  miner.mempool_.clear();
  record("block.produce", m, std::nullopt,
         "height " + std::to_string(block.height) + " txs " + std::to_string(block.transactions.size()));
  prune_peers(m);
  auto encoded = block.encode();
  gossip(m, std::nullopt, [&](std::size_t p) {
    send(m, p, "block", [this, p, m, encoded] { receive_block(p, m, encoded); });
  });
  return block;
}

void SimNetwork::receive_block(std::size_t node, std::size_t from, const Bytes& encoded) {
  auto& n = nodes_[node];
  if (!n.peers_.contains(from)) return;
  Block block;
  try {
    block = Block::decode(encoded);
  } catch (const Error& e) {
    record("block.reject", node, from, e.what());
    return;
  }
  const auto height = n.chain_->height();
  if (block.height <= height) return;
  if (block.height > height + 1) {
    request_sync(node, from);
    return;
  }
  try {
    n.chain_->accept_block(block);
  } catch (const ValidationError& e) {
    record("block.reject", node, from, e.what());
    return;
  }
  std::set<Hash256> included;
  for (const auto& tx : block.transactions) included.insert(tx.tx_id);
  std::erase_if(n.mempool_, [&](const Transaction& tx) {
    return included.contains(tx.tx_id) || tx.nonce < n.chain_->state().next_nonce(tx.signer);
  });
  record("block.accept", node, from, "height " + std::to_string(block.height));
  prune_peers(node);
  gossip(node, from, [&](std::size_t p) {
    send(node, p, "block", [this, p, node, encoded] { receive_block(p, node, encoded); });
  });
}

void SimNetwork::request_sync(std::size_t node, std::size_t from) {
  const auto have = nodes_[node].chain_->height();
  send(node, from, "sync.request", [this, node, from, have] {
    const auto& chain = *nodes_[from].chain_;
    if (chain.height() <= have) return;
    std::vector<Bytes> blocks;
    for (auto h = have + 1; h <= chain.height(); ++h) {
      auto view = chain.block_bytes(h);
      blocks.emplace_back(view.begin(), view.end());
    }
    send(from, node, "sync.response", [this, node, from, blocks] {
      for (const auto& b : blocks) receive_block(node, from, b);
    });
  });
}

void SimNetwork::prune_peers(std::size_t node) {
  auto peers = nodes_[node].peers_;
  for (auto p : peers) {
    const auto& perms = nodes_[node].chain_->state().permissions();
    if (!check_permission(perms, nodes_[p].address(), Permission::Connect) ||
        !check_permission(perms, nodes_[node].address(), Permission::Connect)) {
      disconnect(node, p);
    }
  }
}

void SimNetwork::run_until_quiescent() {
  std::size_t fired = 0;
  while (!queue_.empty()) {
    auto ev = queue_.top();
    queue_.pop();
    now_ = std::max(now_, ev.at);
    ev.fire();
    if (++fired > kMaxEvents) throw Error(ErrorCode::Validation, "simulation did not settle");
  }
}

void SimNetwork::advance(double ms) {
  const double until = now_ + ms;
  while (!queue_.empty() && queue_.top().at <= until) {
    auto ev = queue_.top();
    queue_.pop();
    now_ = std::max(now_, ev.at);
    ev.fire();
  }
  now_ = until;
}

void SimNetwork::stop(std::size_t node) {
  auto& n = nodes_.at(node);
  if (!n.running_) return;
  for (auto p : std::set<std::size_t>(n.peers_)) disconnect(node, p);
  n.persisted_ = n.chain_->snapshot();
  n.chain_.reset();
  n.mempool_.clear();
  n.running_ = false;
  record("node.stop", node, std::nullopt);
}

void SimNetwork::start(std::size_t node) {
  auto& n = nodes_.at(node);
  if (n.running_) return;
  auto replay = catch_up(n.persisted_);
  if (replay.error) throw *replay.error;
  n.chain_.emplace(std::move(*replay.chain));
  n.running_ = true;
  n.wallet_.sync_nonce(n.chain_->state().next_nonce(n.address()));
  record("node.start", node, std::nullopt, "height " + std::to_string(n.chain_->height()));
}

void SimNetwork::sync_from(std::size_t node, std::size_t source) {
  auto& n = nodes_.at(node);
  const auto& src = nodes_.at(source);
  if (!n.running_ || !src.running_) throw Error(ErrorCode::Usage, "sync needs both nodes running");
  auto replay = catch_up(src.chain_->snapshot());
  if (replay.error) throw *replay.error;
  n.chain_.emplace(std::move(*replay.chain));
  n.wallet_.sync_nonce(n.chain_->state().next_nonce(n.address()));
  record("sync.import", node, source, "height " + std::to_string(n.chain_->height()));
}

CycleResult SimNetwork::stop_start_cycle(std::size_t node, double gap_ms) {
  auto targets = nodes_.at(node).peers_;
  if (targets.empty()) throw Error(ErrorCode::Usage, nodes_[node].name() + " has no peers to reconnect to");
  if (gap_ms < 0) throw Error(ErrorCode::Usage, "gap must be non-negative");
  stop(node);
  advance(gap_ms);
  start(node);
  CycleResult out;
  double total = 0;
  for (auto t : targets) {
    auto hs = connect(node, t);
    if (!hs.connected) {
      throw Error(ErrorCode::Denied, "reconnect to " + nodes_[t].name() + " aborted at step " +
                                         std::to_string(hs.step) + ": " + to_string(hs.reason));
    }
    total += hs.mean_leg_ms();
    out.handshakes.push_back(hs);
  }
  run_until_quiescent();
  out.sample_ms = total / static_cast<double>(targets.size());
  auto mem = nodes_[node].chain_->memory_report();
  out.memory_bytes = mem.index_bytes + mem.state_bytes;
  out.block_count = mem.block_count;
  return out;
}

std::size_t ScenarioConfig::scenario_nodes(std::string_view name) {
  if (name == "S1") return 2;
  if (name == "S2") return 3;
  if (name == "S3") return 8;
  config_error("unknown scenario '" + std::string(name) + "' (expected S1, S2 or S3)");
}

ScenarioConfig ScenarioConfig::for_scenario(std::string_view name) {
  ScenarioConfig c;
  c.scenario = std::string(name);
  c.nodes = scenario_nodes(name);
  return c;
}

ScenarioConfig ScenarioConfig::parse(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto body = trim(line);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string::npos) config_error("line " + std::to_string(lineno) + ": expected key = value");
    auto key = trim(std::string_view(body).substr(0, eq));
    auto value = trim(std::string_view(body).substr(eq + 1));
    if (!kv.emplace(key, value).second) config_error("duplicate key '" + key + "'");
  }
  if (!kv.contains("scenario")) config_error("missing key 'scenario'");
  auto c = for_scenario(kv["scenario"]);
  for (const auto& [key, value] : kv) {
    if (key == "scenario") continue;
    if (key == "nodes") {
      c.nodes = parse_count(key, value);
    } else if (key == "link") {
      c.link = LatencyModel::parse(value);
    } else if (key == "observations") {
      c.observations = parse_count(key, value);
    } else if (key == "seed") {
      c.seed = parse_count(key, value);
    } else if (key == "gap_ms") {
      c.gap_ms = parse_number(key, value);
    } else {
      config_error("unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

void ScenarioConfig::validate() const {
  const auto expected = scenario_nodes(scenario);
  if (nodes != expected) {
    config_error("scenario " + scenario + " has " + std::to_string(expected) + " nodes, config says " +
                 std::to_string(nodes));
  }
  if (observations == 0) config_error("observations must be at least 1");
  if (!(gap_ms >= 0) || !std::isfinite(gap_ms)) config_error("gap_ms must be non-negative");
}

std::string ScenarioConfig::to_text() const {
  return "scenario = " + scenario + "\nnodes = " + std::to_string(nodes) + "\nlink = " + link.to_string() +
         "\nobservations = " + std::to_string(observations) + "\nseed = " + std::to_string(seed) +
         "\ngap_ms = " + format_plain(gap_ms) + "\n";
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  config.validate();
  SimNetwork net(config.seed, ChainParams{}, config.link);
  for (std::size_t i = 0; i < config.nodes; ++i) net.add_node("node" + std::to_string(i + 1));

  const PermissionSet member{Permission::Connect, Permission::Send, Permission::Receive};
  for (std::size_t i = 1; i < config.nodes; ++i) {
    net.submit(0, GrantPayload{net.node(i).address(), member, {}, {}});
  }
  net.produce_block();
  for (std::size_t i = 1; i < config.nodes; ++i) {
    auto hs = net.connect(0, i);
    if (!hs.connected) throw Error(ErrorCode::Denied, "initial connection to " + net.node(i).name() + " failed");
  }
  net.run_until_quiescent();

  ScenarioResult result;
  result.config = config;
  const auto root = ChainParams{}.root_stream_name;
  for (std::size_t k = 0; k < config.observations; ++k) {
    auto tag = "observation-" + std::to_string(k + 1);
    net.submit(0, StreamPublishPayload{root, tag, Bytes(tag.begin(), tag.end())});
    net.produce_block();
    net.run_until_quiescent();
    auto cycle = net.stop_start_cycle(0, config.gap_ms);
    result.samples.push_back(cycle.sample_ms);
    result.cycles.push_back(std::move(cycle));
  }
  result.trace = net.trace();
  return result;
}

}  // namespace permledger
