#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "permledger/permledger.h"

using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct Globals {
  std::string chain_dir = ".";
  std::string node;
  std::string format = "table";
};

class Failure : public std::runtime_error {
 public:
  Failure(pl_status status, const std::string& message) : std::runtime_error(message), status(status) {}
  pl_status status;
};

void check(pl_status status) {
  if (status != PL_OK) throw Failure(status, pl_last_error());
}

std::string take(char* s) {
  std::string out = s == nullptr ? std::string{} : std::string(s);
  pl_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure(PL_E_IO, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string cell(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "-";
  if (v.is_array() && std::all_of(v.begin(), v.end(), [](const auto& e) { return e.is_string(); })) {
    std::string out;
    for (const auto& e : v) out += (out.empty() ? "" : ",") + e.get<std::string>();
    return out;
  }
  return v.dump();
}

std::string render_rows(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size(), 0);
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  auto line = [&](const std::vector<std::string>& r) {
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) {
      const std::string v = c < r.size() ? r[c] : "";
      out += v;
      if (c + 1 < header.size()) out += std::string(width[c] - v.size() + 2, ' ');
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\n";
  };
  std::string out = line(header);
  for (const auto& r : rows) out += line(r);
  return out;
}

std::string render_table(const ordered_json& doc) {
  if (doc.is_array()) {
    if (doc.empty()) return "(none)\n";
    std::vector<std::string> header;
    for (const auto& item : doc) {
      if (!item.is_object()) continue;
      for (const auto& [k, v] : item.items()) {
        if (std::find(header.begin(), header.end(), k) == header.end()) header.push_back(k);
      }
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& item : doc) {
      std::vector<std::string> row;
      for (const auto& k : header) row.push_back(item.contains(k) ? cell(item[k]) : "");
      rows.push_back(std::move(row));
    }
    return render_rows(header, rows);
  }
  std::vector<std::vector<std::string>> rows;
  for (const auto& [k, v] : doc.items()) rows.push_back({k, cell(v)});
  return render_rows({"field", "value"}, rows);
}

std::string render_bench(const ordered_json& doc) {
  const auto& lat = doc.at("latency");
  const auto& row = lat.at("row");
  std::string out = render_rows({"Scenarios", "N", "Min", "Max", "Avg.", "SD"},
                                {{lat.at("scenario").get<std::string>(), row.at("N").get<std::string>(),
                                  row.at("Min").get<std::string>(), row.at("Max").get<std::string>(),
                                  row.at("Avg.").get<std::string>(), row.at("SD").get<std::string>()}});
  out += "\n";
  std::vector<std::vector<std::string>> mem;
  for (const auto& r : doc.at("memory").at("rows")) {
    mem.push_back({std::to_string(r.at("observation").get<std::size_t>()),
                   std::to_string(r.at("initial_bytes").get<std::size_t>()),
                   std::to_string(r.at("post_start_bytes").get<std::size_t>()),
                   std::to_string(r.at("delta_bytes").get<std::size_t>()),
                   std::to_string(r.at("per_block_bytes").get<std::size_t>())});
  }
  out += render_rows({"Observation", "Initial (B)", "Started (B)", "Delta (B)", "Per block (B)"}, mem);
  out += "\n";
  for (const auto& f : doc.at("files")) out += "wrote " + f.get<std::string>() + "\n";
  return out;
}

void emit(const Globals& g, const std::string& json_text, const std::function<std::string(const ordered_json&)>& table = {}) {
  if (g.format == "json") {
    std::cout << json_text << "\n";
    return;
  }
  auto doc = ordered_json::parse(json_text);
  std::cout << (table ? table(doc) : render_table(doc));
}

class Session {
 public:
  explicit Session(const std::string& dir) { check(pl_workspace_open(dir.c_str(), &ws_)); }
  ~Session() { pl_workspace_close(ws_); }
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  pl_workspace* get() const { return ws_; }
  void save() { check(pl_workspace_save(ws_)); }

 private:
  pl_workspace* ws_ = nullptr;
};

/// Runs one workspace command, persists the directory and prints the result.
void run_in_workspace(const Globals& g, const std::function<pl_status(pl_workspace*, char**)>& call) {
  Session s(g.chain_dir);
  char* out = nullptr;
  check(call(s.get(), &out));
  auto text = take(out);
  s.save();
  emit(g, text);
}

/// Joins list arguments given either as "a,b" or as "a," "b".
std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    std::stringstream ss(p);
    for (std::string piece; std::getline(ss, piece, ',');) {
      if (piece.find_first_not_of(' ') == std::string::npos) continue;
      out += (out.empty() ? "" : ",") + piece;
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Permissioned ledger node and data-sharing toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--chain-dir", g.chain_dir, "Chain working directory")->capture_default_str();
  app.add_option("--node", g.node, "Local identity acting as the node (default: founder)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "table"}))->capture_default_str();
  app.set_version_flag("--version", std::string(pl_version()));

  std::function<void()> action;

  auto* create = app.add_subcommand("create-chain", "Create a chain from a parameter file");
  std::string params_file, founder = "node1";
  std::optional<std::string> seed;
  create->add_option("--params", params_file, "Chain parameter file (key = value)");
  create->add_option("--founder", founder, "Name of the founding identity")->capture_default_str();
  create->add_option("--seed", seed, "Deterministic seed for the founder key");
  create->callback([&] {
    action = [&] {
      const auto text = params_file.empty() ? std::string{} : read_file(params_file);
      pl_workspace* ws = nullptr;
      check(pl_workspace_create(g.chain_dir.c_str(), text.c_str(), founder.c_str(), seed ? seed->c_str() : nullptr, &ws));
      char* out = nullptr;
      auto status = pl_summary(ws, &out);
      pl_workspace_close(ws);
      check(status);
      emit(g, take(out));
    };
  });

  auto* identity = app.add_subcommand("identity", "Create a local identity, or list them");
  std::string id_name;
  std::optional<std::string> id_seed;
  identity->add_option("--name", id_name, "Name of the new identity");
  identity->add_option("--seed", id_seed, "Deterministic seed");
  identity->callback([&] {
    action = [&] {
      run_in_workspace(g, [&](pl_workspace* ws, char** out) {
        if (id_name.empty()) return pl_identity_list(ws, out);
        return pl_identity_create(ws, id_name.c_str(), id_seed ? id_seed->c_str() : nullptr, out);
      });
    };
  });

  std::string target;
  std::vector<std::string> flags;
  for (auto [name, revoke] : {std::pair{"grant", false}, std::pair{"revoke", true}}) {
    auto* sub = app.add_subcommand(name, revoke ? "Revoke permissions" : "Grant permissions");
    sub->add_option("address", target, "Target address or identity name")->required();
    sub->add_option("flags", flags, "Permission list, e.g. connect,send")->required();
    sub->callback([&, revoke] {
      action = [&, revoke] {
        const auto list = join(flags);
        run_in_workspace(g, [&](pl_workspace* ws, char** out) {
          return revoke ? pl_revoke(ws, g.node.c_str(), target.c_str(), list.c_str(), out)
                        : pl_grant(ws, g.node.c_str(), target.c_str(), list.c_str(), out);
        });
      };
    });
  }

  auto* cstream = app.add_subcommand("create-stream", "Create a stream");
  std::string stream_name;
  bool open_stream = false;
  cstream->add_option("name", stream_name, "Stream name")->required();
  cstream->add_flag("--open", open_stream, "Anyone holding send may write");
  cstream->callback([&] {
    action = [&] {
      run_in_workspace(g, [&](pl_workspace* ws, char** out) {
        return pl_create_stream(ws, g.node.c_str(), stream_name.c_str(), open_stream ? 1 : 0, out);
      });
    };
  });

  auto* publish = app.add_subcommand("publish", "Publish an item to a stream");
  std::string pub_stream, pub_key, pub_data, pub_file;
  publish->add_option("stream", pub_stream, "Stream name")->required();
  publish->add_option("key", pub_key, "Item key")->required();
  auto* data_opt = publish->add_option("data", pub_data, "Item data as text");
  publish->add_option("--file", pub_file, "Read item data from a file")->excludes(data_opt);
  publish->callback([&] {
    action = [&] {
      const auto data = pub_file.empty() ? pub_data : read_file(pub_file);
      run_in_workspace(g, [&](pl_workspace* ws, char** out) {
        return pl_publish(ws, g.node.c_str(), pub_stream.c_str(), pub_key.c_str(),
                          reinterpret_cast<const unsigned char*>(data.data()), data.size(), out);
      });
    };
  });

  auto* subscribe = app.add_subcommand("subscribe", "Subscribe the node to a stream");
  std::string sub_stream;
  subscribe->add_option("stream", sub_stream, "Stream name")->required();
  subscribe->callback([&] {
    action = [&] {
      run_in_workspace(g, [&](pl_workspace* ws, char** out) {
        return pl_subscribe(ws, g.node.c_str(), sub_stream.c_str(), out);
      });
    };
  });

  auto* list = app.add_subcommand("liststreams", "List streams");
  list->callback([&] {
    action = [&] {
      run_in_workspace(g, [&](pl_workspace* ws, char** out) { return pl_list_streams(ws, g.node.c_str(), out); });
    };
  });

  auto* items = app.add_subcommand("get-items", "Items of a subscribed stream");
  std::string items_stream;
  std::optional<std::string> items_key, items_publisher;
  items->add_option("stream", items_stream, "Stream name")->required();
  items->add_option("--key", items_key, "Only items with this key");
  items->add_option("--publisher", items_publisher, "Only items from this publisher");
  items->callback([&] {
    action = [&] {
      run_in_workspace(g, [&](pl_workspace* ws, char** out) {
        return pl_get_items(ws, g.node.c_str(), items_stream.c_str(), items_key ? items_key->c_str() : nullptr,
                            items_publisher ? items_publisher->c_str() : nullptr, out);
      });
    };
  });

  auto* announce = app.add_subcommand("announce-key", "Publish the node's public keys");
  announce->callback([&] {
    action = [&] {
      run_in_workspace(g, [&](pl_workspace* ws, char** out) { return pl_announce_key(ws, g.node.c_str(), out); });
    };
  });

  auto* share = app.add_subcommand("share", "Share a stored profile with other nodes");
  std::string share_user;
  std::vector<std::string> share_to;
  share->add_option("--user", share_user, "User id (or user identity name)")->required();
  share->add_option("--to", share_to, "Recipients (names or addresses)")->required()->delimiter(',');
  share->callback([&] {
    action = [&] {
      const auto to = join(share_to);
      run_in_workspace(g, [&](pl_workspace* ws, char** out) {
        return pl_share(ws, g.node.c_str(), share_user.c_str(), to.c_str(), out);
      });
    };
  });

  auto* import = app.add_subcommand("import", "Import a shared profile");
  std::string import_id;
  import->add_option("item_id", import_id, "Shared item id")->required();
  import->callback([&] {
    action = [&] {
      run_in_workspace(g, [&](pl_workspace* ws, char** out) {
        return pl_import(ws, g.node.c_str(), import_id.c_str(), out);
      });
    };
  });

  auto* ingest = app.add_subcommand("ingest", "Ingest a profile document into the node's repository");
  std::string ingest_file;
  ingest->add_option("file", ingest_file, "Profile document")->required();
  ingest->callback([&] {
    action = [&] {
      const auto doc = read_file(ingest_file);
      run_in_workspace(g, [&](pl_workspace* ws, char** out) {
        return pl_ingest(ws, g.node.c_str(), doc.c_str(), out);
      });
    };
  });

  auto* consent = app.add_subcommand("consent", "Record a user's consent decision");
  std::string consent_action, consent_user, consent_grantee;
  std::vector<std::string> consent_fields;
  consent->add_option("action", consent_action, "grant, alter or withdraw")
      ->required()
      ->check(CLI::IsMember({"grant", "alter", "withdraw"}));
  consent->add_option("--user", consent_user, "User identity name")->required();
  consent->add_option("--grantee", consent_grantee, "Grantee name, address or *")->required();
  consent->add_option("--fields", consent_fields, "Profile fields")->delimiter(',');
  consent->callback([&] {
    action = [&] {
      const auto fields = join(consent_fields);
      run_in_workspace(g, [&](pl_workspace* ws, char** out) {
        return pl_consent(ws, g.node.c_str(), consent_action.c_str(), consent_user.c_str(), consent_grantee.c_str(),
                          fields.c_str(), out);
      });
    };
  });

  auto* bench = app.add_subcommand("bench", "Run a latency scenario and write reports");
  std::string bench_config, bench_scenario = "S1", bench_out = "reports";
  std::optional<std::string> bench_link;
  std::optional<std::uint64_t> bench_seed, bench_obs;
  std::optional<double> bench_gap;
  bench->add_option("--config", bench_config, "Scenario config file (key = value)");
  bench->add_option("--scenario", bench_scenario, "S1, S2 or S3 when no config file is given")->capture_default_str();
  bench->add_option("--link", bench_link, "Link model, e.g. \"uniform 85 160\"");
  bench->add_option("--seed", bench_seed, "Random seed");
  bench->add_option("--observations", bench_obs, "Number of stop/start observations");
  bench->add_option("--gap-ms", bench_gap, "Gap between stop and restart");
  bench->add_option("--out", bench_out, "Report directory")->capture_default_str();
  bench->callback([&] {
    action = [&] {
      const bool overrides = bench_link || bench_seed || bench_obs || bench_gap;
      if (!bench_config.empty() && overrides) {
        throw Failure(PL_E_USAGE, "--config cannot be combined with --link, --seed, --observations or --gap-ms");
      }
      std::string text = bench_config.empty() ? "scenario = " + bench_scenario + "\n" : read_file(bench_config);
      if (bench_link) text += "link = " + *bench_link + "\n";
      if (bench_seed) text += "seed = " + std::to_string(*bench_seed) + "\n";
      if (bench_obs) text += "observations = " + std::to_string(*bench_obs) + "\n";
      if (bench_gap) text += "gap_ms = " + std::to_string(*bench_gap) + "\n";
      char* out = nullptr;
      check(pl_bench_run(text.c_str(), bench_out.c_str(), &out));
      emit(g, take(out), render_bench);
    };
  });

  auto* validate = app.add_subcommand("validate", "Replay and validate the chain from genesis");
  std::string snapshot;
  validate->add_option("--snapshot", snapshot, "Snapshot file (default: the chain directory's)");
  validate->callback([&] {
    action = [&] {
      const auto path = snapshot.empty() ? g.chain_dir + "/chain.snap" : snapshot;
      char* out = nullptr;
      check(pl_validate_snapshot(path.c_str(), &out));
      emit(g, take(out));
    };
  });

  auto* stop = app.add_subcommand("stop", "Stop the node; the next command replays the chain");
  stop->callback([&] {
    action = [&] {
      run_in_workspace(g, [&](pl_workspace* ws, char** out) { return pl_stop(ws, g.node.c_str(), out); });
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const Failure& f) {
    std::cerr << "error: " << pl_status_name(f.status) << ": " << f.what() << "\n";
    return f.status == PL_E_USAGE ? kExitUsage : kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
}
