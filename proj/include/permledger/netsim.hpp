#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "permledger/chain.hpp"

namespace permledger {

struct LatencyModel {
  enum class Kind { Fixed, Uniform };

  Kind kind = Kind::Fixed;
  double min_ms = 100;
  double max_ms = 100;

  static LatencyModel fixed(double ms);
  /// Throws Error(Config) unless 0 <= lo <= hi.
  static LatencyModel uniform(double lo, double hi);
  /// "fixed <ms>" or "uniform <min> <max>". Throws Error(Config).
  static LatencyModel parse(std::string_view text);

  double sample(std::mt19937_64& rng) const;
  std::string to_string() const;

  bool operator==(const LatencyModel&) const = default;
};

enum class AbortReason { None, NotPermitted, BadSignature, Timeout };
const char* to_string(AbortReason r);

struct HandshakeResult {
  bool connected = false;
  int step = 0;  // step that aborted; 0 when connected
  AbortReason reason = AbortReason::None;
  double round_trip_ms = 0;  // sum of the delays of every handshake message sent
  int legs = 0;

  /// Mean one-way delay over the handshake messages.
  double mean_leg_ms() const { return legs == 0 ? 0.0 : round_trip_ms / legs; }
};

struct TraceEvent {
  double at_ms = 0;
  std::string kind;
  std::string node;
  std::string peer;
  std::string detail;

  /// Tab-separated: time (3 decimals), kind, node, peer, detail.
  std::string to_line() const;
  bool operator==(const TraceEvent&) const = default;
};

std::string export_trace(const std::vector<TraceEvent>& trace);

class SimNode {
 public:
  const std::string& name() const { return name_; }
  /// `<chain>@<host>:<port>`.
  std::string endpoint() const;
  const Address& address() const { return wallet_.address(); }
  const NodeIdentity& identity() const { return wallet_.identity(); }
  bool running() const { return running_; }
  const Chain& chain() const { return *chain_; }
  const std::set<std::size_t>& peers() const { return peers_; }
  const std::vector<Transaction>& mempool() const { return mempool_; }

  /// Test hook: sign handshake challenges with an unrelated key.
  bool forge_signatures = false;

 private:
  friend class SimNetwork;

  Block persisted_genesis() const;

  std::string name_;
  std::string chain_name_;
  std::string host_;
  std::uint16_t port_ = 0;
  Wallet wallet_;
  std::optional<Chain> chain_;
  Bytes persisted_;
  bool running_ = true;
  std::set<std::size_t> peers_;
  std::vector<Transaction> mempool_;
  std::set<Hash256> seen_txs_;

  SimNode(std::string name, std::string host, std::uint16_t port, NodeIdentity id)
      : name_(std::move(name)), host_(std::move(host)), port_(port), wallet_(std::move(id)) {}
};

struct CycleResult {
  std::vector<HandshakeResult> handshakes;
  /// Mean over targets of each handshake's mean one-way delay.
  double sample_ms = 0;
  std::size_t memory_bytes = 0;  // index + state after restart
  std::size_t block_count = 0;
};

/// Single-threaded discrete-event network over a virtual millisecond clock.
/// Identical seed and call sequence give an identical trace.
class SimNetwork {
 public:
  explicit SimNetwork(std::uint64_t seed, ChainParams params = {},
                      LatencyModel default_link = LatencyModel::fixed(100));

  /// The first node founds the chain; later nodes start from its genesis.
  std::size_t add_node(std::string name);
  std::size_t size() const { return nodes_.size(); }
  const SimNode& node(std::size_t i) const { return nodes_.at(i); }
  SimNode& node_mut(std::size_t i) { return nodes_.at(i); }

  void set_link(std::size_t a, std::size_t b, LatencyModel model);
  const LatencyModel& link(std::size_t a, std::size_t b) const;

  double now() const { return now_; }
  const std::vector<TraceEvent>& trace() const { return trace_; }

  /// Four-message mutual handshake; on success both sides add each other as
  /// peers and sync. Throws Error(Usage) if `a` is not running.
  HandshakeResult connect(std::size_t a, std::size_t b);
  void disconnect(std::size_t a, std::size_t b);

  /// Signs with the node's wallet and gossips the transaction.
  Transaction submit(std::size_t node, Payload payload);
  /// Grant helper: submit, produce a block, run to quiescence.
  void grant(std::size_t admin, std::size_t target, PermissionSet flags);

  /// The scheduled miner seals its valid mempool transactions and gossips
  /// the block. Throws Error(NotPermittedMiner) if that miner is offline.
  Block produce_block();

  /// Delivers events until none are left.
  void run_until_quiescent();
  void advance(double ms);

  /// Persists the node's blocks and takes it offline.
  void stop(std::size_t node);
  /// Replays the persisted blocks from genesis and brings the node online.
  void start(std::size_t node);

  /// Out-of-band import: `node` replays `source`'s blocks from genesis.
  void sync_from(std::size_t node, std::size_t source);

  /// stop, wait `gap_ms`, start, reconnect to the previous peers, catch up.
  /// Throws Error(Denied) when a reconnect handshake aborts.
  CycleResult stop_start_cycle(std::size_t node, double gap_ms);

 private:
  struct Event {
    double at;
    std::uint64_t seq;
    std::function<void()> fire;
  };
  struct Later {
    bool operator()(const Event& x, const Event& y) const {
      return x.at != y.at ? x.at > y.at : x.seq > y.seq;
    }
  };
  struct Handshake;

  void schedule(double delay, std::function<void()> fire);
  double send(std::size_t from, std::size_t to, std::string kind, std::function<void()> on_arrival);
  void record(std::string kind, std::size_t node, std::optional<std::size_t> peer, std::string detail = {});
  std::size_t index_of(const Address& a) const;

  void receive_tx(std::size_t node, std::size_t from, const Transaction& tx);
  void receive_block(std::size_t node, std::size_t from, const Bytes& encoded);
  void request_sync(std::size_t node, std::size_t from);
  void prune_peers(std::size_t node);
  void gossip(std::size_t node, std::optional<std::size_t> except, const std::function<void(std::size_t)>& send_to);

  std::mt19937_64 rng_;
  ChainParams params_;
  LatencyModel default_link_;
  std::map<std::pair<std::size_t, std::size_t>, LatencyModel> links_;
  std::vector<SimNode> nodes_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t seq_ = 0;
  double now_ = 0;
  std::uint64_t seed_;
  std::vector<TraceEvent> trace_;
};

struct ScenarioConfig {
  std::string scenario = "S1";
  std::size_t nodes = 2;
  LatencyModel link = LatencyModel::uniform(85, 160);
  std::size_t observations = 20;
  std::uint64_t seed = 1;
  double gap_ms = 60000;

  /// Node count of a named scenario: S1 = 2, S2 = 3, S3 = 8.
  static std::size_t scenario_nodes(std::string_view name);
  static ScenarioConfig for_scenario(std::string_view name);
  /// `key = value` lines with keys scenario, nodes, link, observations, seed,
  /// gap_ms; `#` comments. Throws Error(Config).
  static ScenarioConfig parse(std::string_view text);
  /// Throws Error(Config).
  void validate() const;
  std::string to_text() const;
};

struct ScenarioResult {
  ScenarioConfig config;
  /// One per observation: mean reconnect latency over the observer's targets.
  std::vector<double> samples;
  std::vector<CycleResult> cycles;
  std::vector<TraceEvent> trace;
};

/// Node1 is granted-to, connected to every other node, then stopped and
/// restarted once per observation; each restart reconnects to all targets.
ScenarioResult run_scenario(const ScenarioConfig& config);

}  // namespace permledger
