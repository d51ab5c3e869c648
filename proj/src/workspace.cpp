#include "permledger/workspace.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "permledger/error.hpp"

namespace permledger {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr std::string_view kWorkspaceFormat = "chain-dir-v1";

TimestampMs now_ms() {
  return static_cast<TimestampMs>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                      std::chrono::system_clock::now().time_since_epoch())
                                      .count());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string dump(const ordered_json& j) { return j.dump(2); }

bool printable(ByteView data) {
  return std::all_of(data.begin(), data.end(), [](std::uint8_t c) { return c == '\n' || c == '\t' || (c >= 0x20 && c < 0x7f); });
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    auto b = cur.find_first_not_of(" \t");
    if (b != std::string::npos) out.push_back(cur.substr(b, cur.find_last_not_of(" \t") - b + 1));
    cur.clear();
  };
  for (char c : text) {
    if (c == ',') {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

NodeIdentity make_identity(const std::optional<std::string>& seed) {
  if (seed) return NodeIdentity::generate(as_bytes(*seed));
  return NodeIdentity::generate();
}

ordered_json block_json(const Block& b) {
  ordered_json j;
  j["height"] = b.height;
  j["block_hash"] = to_hex(b.block_hash);
  j["miner"] = b.miner.str();
  j["transactions"] = b.transactions.size();
  return j;
}

ordered_json key_json(const Member& m) {
  ordered_json j;
  j["name"] = m.name;
  j["address"] = m.address().str();
  j["master_seed"] = to_hex(m.wallet.identity().master_seed());
  j["wrap_generation"] = m.wallet.identity().wrap_generation();
  return j;
}

fs::path node_dir(const fs::path& dir, const std::string& name) { return dir / "nodes" / name; }

void check_name(const std::string& name) {
  if (name.empty() || name.size() > 64 ||
      !std::all_of(name.begin(), name.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'; })) {
    throw Error(ErrorCode::Usage, "identity names use letters, digits, '-' and '_' (got '" + name + "')");
  }
}

}  // namespace

Workspace Workspace::create(const fs::path& dir, std::string_view params_text, const std::string& founder,
                            std::optional<std::string> seed) {
  check_name(founder);
  if (fs::exists(dir / "chain.snap")) throw Error(ErrorCode::Io, dir.string() + " already holds a chain");
  auto params = ChainParams::parse(params_text);
  params.validate();
  fs::create_directories(dir / "keys");
  fs::create_directories(dir / "nodes");
  Workspace ws(dir, Consortium::create(params, founder, make_identity(seed), now_ms()), founder);
  ws.save();
  return ws;
}

Workspace Workspace::open(const fs::path& dir) {
  const auto meta_path = dir / "workspace.json";
  if (!fs::exists(meta_path)) throw Error(ErrorCode::NotFound, "no chain in " + dir.string() + " (run create-chain)");
  auto meta = ordered_json::parse(read_file(meta_path), nullptr, false);
  if (meta.is_discarded() || meta.value("format", "") != kWorkspaceFormat) {
    throw Error(ErrorCode::Decode, meta_path.string() + " is not a chain directory file");
  }
  const auto founder = meta.value("founder", "");

  auto params = ChainParams::parse(read_file(dir / "params.conf"));
  const auto snap = read_file(dir / "chain.snap");
  auto replay = catch_up(as_bytes(snap));
  if (replay.error) throw *replay.error;
  if (!(replay.chain->params() == params)) {
    throw Error(ErrorCode::InvalidParams, "params.conf does not match the parameters recorded in chain.snap");
  }
  Workspace ws(dir, Consortium(std::move(*replay.chain)), founder);

  std::vector<fs::path> keys;
  for (const auto& entry : fs::directory_iterator(dir / "keys")) {
    if (entry.path().extension() == ".key") keys.push_back(entry.path());
  }
  std::sort(keys.begin(), keys.end());
  for (const auto& path : keys) {
    auto j = ordered_json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::Decode, "malformed key file " + path.string());
    try {
      auto master = to_array<crypto::kKeySize>(from_hex(j.at("master_seed").get<std::string>()));
      auto id = NodeIdentity::from_master_seed(master, j.at("wrap_generation").get<std::uint32_t>());
      auto& m = ws.consortium_.add_member(j.at("name").get<std::string>(), std::move(id));
      const auto nd = node_dir(dir, m.name);
      if (fs::exists(nd / "subscriptions.json")) {
        auto subs = ordered_json::parse(read_file(nd / "subscriptions.json"), nullptr, false);
        if (subs.is_array()) {
          for (const auto& s : subs) {
            try {
              m.view.subscribe(ws.consortium_.state(), s.get<std::string>());
            } catch (const Error&) {
              // Receive was revoked since the last run; the subscription lapses.
            }
          }
        }
      }
      m.repo = Repository::load(nd / "repo.json");
      m.stopped = fs::exists(nd / "stopped");
    } catch (const ordered_json::exception& e) {
      throw Error(ErrorCode::Decode, "malformed key file " + path.string() + ": " + e.what());
    }
  }
  return ws;
}

void Workspace::save() const {
  const auto& chain = consortium_.chain();
  write_file(dir_ / "params.conf", chain.params().to_text());
  auto snap = chain.snapshot();
  write_file(dir_ / "chain.snap", to_string(snap));
  ordered_json meta;
  meta["format"] = kWorkspaceFormat;
  meta["founder"] = founder_;
  write_file(dir_ / "workspace.json", dump(meta) + "\n");
  fs::create_directories(dir_ / "keys");
  for (const auto& m : consortium_.members()) {
    write_file(dir_ / "keys" / (m.name + ".key"), dump(key_json(m)) + "\n");
    const auto nd = node_dir(dir_, m.name);
    fs::create_directories(nd);
    ordered_json subs = m.view.subscriptions();
    write_file(nd / "subscriptions.json", dump(subs) + "\n");
    m.repo.save(nd / "repo.json");
    if (m.stopped) {
      write_file(nd / "stopped", "stopped\n");
    } else {
      fs::remove(nd / "stopped");
    }
  }
}

Member& Workspace::node(const std::string& name) {
  auto& m = consortium_.member(name.empty() ? founder_ : name);
  if (m.stopped) {
    // The chain was already replayed from genesis when the directory opened.
    m.stopped = false;
    restarted_.push_back(m.name);
  }
  return m;
}

std::string Workspace::summary() const {
  const auto& chain = consortium_.chain();
  ordered_json j;
  j["chain"] = chain.params().chain_name;
  j["founder"] = founder_;
  j["height"] = chain.height();
  j["tip"] = to_hex(chain.tip_hash());
  j["endpoint"] = chain.params().chain_name + "@127.0.0.1:7447";
  ordered_json ids = ordered_json::array();
  for (const auto& m : consortium_.members()) ids.push_back({{"name", m.name}, {"address", m.address().str()}});
  j["identities"] = std::move(ids);
  return dump(j);
}

std::string Workspace::create_identity(const std::string& name, std::optional<std::string> seed) {
  check_name(name);
  auto& m = consortium_.add_member(name, make_identity(seed));
  ordered_json j;
  j["name"] = m.name;
  j["address"] = m.address().str();
  j["permissions"] = consortium_.state().permissions().effective_set(m.address()).to_string();
  return dump(j);
}

std::string Workspace::list_identities() const {
  ordered_json arr = ordered_json::array();
  for (const auto& m : consortium_.members()) {
    ordered_json j;
    j["name"] = m.name;
    j["address"] = m.address().str();
    j["permissions"] = consortium_.state().permissions().effective_set(m.address()).to_string();
    j["stopped"] = m.stopped;
    arr.push_back(std::move(j));
  }
  return dump(arr);
}

std::string Workspace::grant(const std::string& node_name, const std::string& target, const std::string& flags,
                             bool revoke) {
  auto& by = node(node_name);
  auto to = consortium_.resolve(target);
  auto set = PermissionSet::parse(flags);
  auto block = revoke ? consortium_.revoke(by.name, to, set, now_ms()) : consortium_.grant(by.name, to, set, now_ms());
  ordered_json j;
  j["target"] = to.str();
  j[revoke ? "revoked" : "granted"] = set.to_string();
  j["permissions"] = consortium_.state().permissions().effective_set(to).to_string();
  j["block"] = block_json(block);
  return dump(j);
}

std::string Workspace::create_stream(const std::string& node_name, const std::string& name, bool open) {
  auto& by = node(node_name);
  auto block = consortium_.create_stream(by.name, name, open, now_ms());
  ordered_json j;
  j["stream"] = name;
  j["open"] = open;
  j["creator"] = by.address().str();
  j["block"] = block_json(block);
  return dump(j);
}

std::string Workspace::publish(const std::string& node_name, const std::string& stream, const std::string& key,
                               Bytes data) {
  auto& by = node(node_name);
  const auto size = data.size();
  auto block = consortium_.publish(by.name, stream, key, std::move(data), now_ms());
  ordered_json j;
  j["stream"] = stream;
  j["key"] = key;
  j["bytes"] = size;
  j["txid"] = to_hex(block.transactions.front().tx_id);
  j["block"] = block_json(block);
  return dump(j);
}

std::string Workspace::subscribe(const std::string& node_name, const std::string& stream) {
  auto& m = node(node_name);
  m.view.subscribe(consortium_.state(), stream);
  ordered_json j;
  j["node"] = m.name;
  j["stream"] = stream;
  j["subscribed"] = true;
  return dump(j);
}

std::string Workspace::list_streams(const std::string& node_name) {
  auto& m = node(node_name);
  ordered_json arr = ordered_json::array();
  for (const auto& s : m.view.list_streams(consortium_.state())) {
    ordered_json j;
    j["name"] = s.name;
    j["creator"] = s.creator.str();
    j["open"] = s.open;
    j["items"] = s.item_count;
    j["publishers"] = s.publisher_count;
    j["subscribed"] = s.subscribed;
    arr.push_back(std::move(j));
  }
  return dump(arr);
}

std::string Workspace::get_items(const std::string& node_name, const std::string& stream,
                                 std::optional<std::string> key, std::optional<std::string> publisher) {
  auto& m = node(node_name);
  ItemFilter filter{std::move(key), std::nullopt};
  if (publisher) filter.publisher = consortium_.resolve(*publisher);
  ordered_json arr = ordered_json::array();
  for (const auto& item : m.view.get_items(consortium_.state(), stream, filter)) {
    ordered_json j;
    j["publisher"] = item.publisher.str();
    j["key"] = item.key ? ordered_json(*item.key) : ordered_json(nullptr);
    if (printable(item.data)) j["data"] = to_string(item.data);
    j["data_hex"] = to_hex(item.data);
    j["height"] = item.ref.height;
    j["confirmed"] = item.confirmed;
    j["txid"] = to_hex(item.tx_id);
    arr.push_back(std::move(j));
  }
  return dump(arr);
}

std::string Workspace::announce_key(const std::string& node_name) {
  auto& m = node(node_name);
  auto block = consortium_.announce_key(m.name, now_ms());
  ordered_json j;
  j["address"] = m.address().str();
  j["signing_key"] = to_hex(m.wallet.identity().public_key());
  j["wrap_key"] = to_hex(m.wallet.identity().wrap_public_key());
  j["block"] = block_json(block);
  return dump(j);
}

std::string Workspace::share(const std::string& node_name, const std::string& user, const std::vector<std::string>& to) {
  auto& m = node(node_name);
  std::string user_id = user;
  if (m.repo.find(user) == nullptr) {
    for (const auto& member : consortium_.members()) {
      if (member.name == user) user_id = member.address().str();
    }
  }
  std::vector<Address> recipients;
  for (const auto& r : to) recipients.push_back(consortium_.resolve(r));
  if (recipients.empty()) throw Error(ErrorCode::Usage, "share needs at least one recipient");
  auto fields = publishable_fields(m.repo, consortium_.state(), user_id, recipients);
  auto result = consortium_.share_profile(m.name, user_id, recipients, now_ms());
  ordered_json j;
  j["item_id"] = result.item_id;
  j["user_id"] = user_id;
  j["fields"] = fields;
  ordered_json rs = ordered_json::array();
  for (const auto& a : result.recipients) rs.push_back(a.str());
  j["recipients"] = std::move(rs);
  j["access_entries"] = result.recipients.size();
  j["height"] = consortium_.chain().height();
  return dump(j);
}

std::string Workspace::import_item(const std::string& node_name, const std::string& item_id) {
  auto& m = node(node_name);
  const auto& profile = consortium_.import_profile(m.name, item_id);
  ordered_json j;
  j["user_id"] = profile.user_id;
  j["source"] = m.repo.find(profile.user_id)->provenance.source.str();
  j["item_id"] = item_id;
  j["profile"] = ordered_json::parse(to_open_format(profile, profile.present_fields()));
  return dump(j);
}

std::string Workspace::ingest(const std::string& node_name, std::string_view document) {
  auto& m = node(node_name);
  const auto& profile = m.repo.ingest(document);
  ordered_json j;
  j["user_id"] = profile.user_id;
  j["fields"] = profile.present_fields();
  return dump(j);
}

std::string Workspace::consent(const std::string& relay, const std::string& kind, const std::string& user,
                               const std::string& grantee, const std::string& fields) {
  ConsentEventKind k;
  if (kind == "grant") {
    k = ConsentEventKind::Grant;
  } else if (kind == "alter") {
    k = ConsentEventKind::Alter;
  } else if (kind == "withdraw") {
    k = ConsentEventKind::Withdraw;
  } else {
    throw Error(ErrorCode::Usage, "consent action must be grant, alter or withdraw");
  }
  auto& r = node(relay);
  auto& u = consortium_.member(user);
  const std::string grantee_id = grantee == kAnyGrantee ? std::string(kAnyGrantee) : consortium_.resolve(grantee).str();
  FieldSet set;
  for (auto& f : split_list(fields)) {
    if (!is_profile_field(f)) throw Error(ErrorCode::UnknownField, "unknown profile field '" + f + "'");
    set.insert(f);
  }
  if (k != ConsentEventKind::Withdraw && set.empty()) throw Error(ErrorCode::Usage, "consent needs --fields");
  auto block = consortium_.consent(r.name, u.name, k, grantee_id, set, now_ms());
  const auto* rec = consortium_.state().consent().find(u.address().str(), grantee_id);
  ordered_json j;
  j["user_id"] = rec->user_id;
  j["grantee"] = rec->grantee;
  j["state"] = to_string(rec->state);
  j["fields"] = rec->effective_fields();
  j["version"] = rec->version;
  j["block"] = block_json(block);
  return dump(j);
}

std::string Workspace::validate() const {
  if (auto err = validate_chain(consortium_.chain())) throw *err;
  ordered_json j;
  j["valid"] = true;
  j["blocks"] = consortium_.chain().block_count();
  j["state_hash"] = to_hex(consortium_.state().state_hash());
  return dump(j);
}

std::string Workspace::stop(const std::string& node_name) {
  auto& m = consortium_.member(node_name.empty() ? founder_ : node_name);
  m.stopped = true;
  auto mem = consortium_.chain().memory_report();
  ordered_json j;
  j["node"] = m.name;
  j["stopped"] = true;
  j["blocks"] = mem.block_count;
  j["index_bytes"] = mem.index_bytes;
  j["state_bytes"] = mem.state_bytes;
  j["per_block_bytes"] = mem.per_block_bytes;
  return dump(j);
}

std::string validate_snapshot_file(const fs::path& path) {
  const auto snap = read_file(path);
  auto replay = catch_up(as_bytes(snap));
  if (replay.error) throw *replay.error;
  ordered_json j;
  j["valid"] = true;
  j["blocks"] = replay.chain->block_count();
  j["height"] = replay.chain->height();
  j["state_hash"] = to_hex(replay.chain->state().state_hash());
  return dump(j);
}

}  // namespace permledger
