#include "permledger/permledger.h"

#include <cstring>
#include <memory>
#include <string>

#include "json.hpp"

#include "permledger/bench.hpp"
#include "permledger/error.hpp"
#include "permledger/workspace.hpp"

using permledger::Error;
using permledger::ErrorCode;
using permledger::Workspace;

static_assert(PL_E_USAGE == static_cast<int>(ErrorCode::Usage) + 1, "status codes mirror ErrorCode");

struct pl_workspace {
  std::unique_ptr<Workspace> ws;
};

namespace {

thread_local std::string g_last_error;

pl_status status_of(ErrorCode code) { return static_cast<pl_status>(static_cast<int>(code) + 1); }

std::string arg(const char* s) { return s == nullptr ? std::string{} : std::string(s); }

char* dup(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename F>
pl_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return PL_OK;
  } catch (const permledger::InvalidTransactionError& e) {
    g_last_error = e.what();
    return status_of(e.cause());
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return PL_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PL_E_INTERNAL;
  }
}

template <typename F>
pl_status with_output(char** out, F&& body) {
  if (out == nullptr) {
    g_last_error = "output pointer is null";
    return PL_E_USAGE;
  }
  *out = nullptr;
  return guarded([&] { *out = dup(body()); });
}

template <typename F>
pl_status with_workspace(pl_workspace* ws, char** out, F&& body) {
  if (ws == nullptr || !ws->ws) {
    g_last_error = "workspace handle is null";
    return PL_E_USAGE;
  }
  return with_output(out, [&] { return body(*ws->ws); });
}

}  // namespace

extern "C" {

const char* pl_version(void) { return "1.0.0"; }

const char* pl_last_error(void) { return g_last_error.c_str(); }

const char* pl_status_name(pl_status status) {
  if (status == PL_OK) return "ok";
  if (status == PL_E_INTERNAL) return "internal";
  if (status > PL_OK && status <= PL_E_USAGE) return permledger::to_string(static_cast<ErrorCode>(status - 1));
  return "unknown";
}

void pl_string_free(char* s) { std::free(s); }

pl_status pl_workspace_create(const char* dir, const char* params_text, const char* founder, const char* seed,
                              pl_workspace** out) {
  if (out == nullptr || dir == nullptr) {
    g_last_error = "null argument";
    return PL_E_USAGE;
  }
  *out = nullptr;
  return guarded([&] {
    auto ws = Workspace::create(dir, arg(params_text), arg(founder),
                                seed ? std::optional<std::string>(seed) : std::nullopt);
    *out = new pl_workspace{std::make_unique<Workspace>(std::move(ws))};
  });
}

pl_status pl_workspace_open(const char* dir, pl_workspace** out) {
  if (out == nullptr || dir == nullptr) {
    g_last_error = "null argument";
    return PL_E_USAGE;
  }
  *out = nullptr;
  return guarded([&] { *out = new pl_workspace{std::make_unique<Workspace>(Workspace::open(dir))}; });
}

pl_status pl_workspace_save(pl_workspace* ws) {
  if (ws == nullptr || !ws->ws) {
    g_last_error = "workspace handle is null";
    return PL_E_USAGE;
  }
  return guarded([&] { ws->ws->save(); });
}

void pl_workspace_close(pl_workspace* ws) { delete ws; }

pl_status pl_summary(pl_workspace* ws, char** out) {
  return with_workspace(ws, out, [&](Workspace& w) { return w.summary(); });
}

pl_status pl_identity_create(pl_workspace* ws, const char* name, const char* seed, char** out) {
  return with_workspace(ws, out, [&](Workspace& w) {
    return w.create_identity(arg(name), seed ? std::optional<std::string>(seed) : std::nullopt);
  });
}

pl_status pl_identity_list(pl_workspace* ws, char** out) {
  return with_workspace(ws, out, [&](Workspace& w) { return w.list_identities(); });
}

pl_status pl_grant(pl_workspace* ws, const char* node, const char* target, const char* flags, char** out) {
  return with_workspace(ws, out, [&](Workspace& w) { return w.grant(arg(node), arg(target), arg(flags), false); });
}

pl_status pl_revoke(pl_workspace* ws, const char* node, const char* target, const char* flags, char** out) {
  return with_workspace(ws, out, [&](Workspace& w) { return w.grant(arg(node), arg(target), arg(flags), true); });
}

pl_status pl_create_stream(pl_workspace* ws, const char* node, const char* name, int open, char** out) {
  return with_workspace(ws, out, [&](Workspace& w) { return w.create_stream(arg(node), arg(name), open != 0); });
}

pl_status pl_publish(pl_workspace* ws, const char* node, const char* stream, const char* key,
                     const unsigned char* data, size_t len, char** out) {
  return with_workspace(ws, out, [&](Workspace& w) {
    permledger::Bytes bytes(data, data + (data == nullptr ? 0 : len));
    return w.publish(arg(node), arg(stream), arg(key), std::move(bytes));
  });
}

pl_status pl_subscribe(pl_workspace* ws, const char* node, const char* stream, char** out) {
  return with_workspace(ws, out, [&](Workspace& w) { return w.subscribe(arg(node), arg(stream)); });
}

pl_status pl_list_streams(pl_workspace* ws, const char* node, char** out) {
  return with_workspace(ws, out, [&](Workspace& w) { return w.list_streams(arg(node)); });
}

pl_status pl_get_items(pl_workspace* ws, const char* node, const char* stream, const char* key,
                       const char* publisher, char** out) {
  return with_workspace(ws, out, [&](Workspace& w) {
    return w.get_items(arg(node), arg(stream), key ? std::optional<std::string>(key) : std::nullopt,
                       publisher ? std::optional<std::string>(publisher) : std::nullopt);
  });
}

pl_status pl_announce_key(pl_workspace* ws, const char* node, char** out) {
  return with_workspace(ws, out, [&](Workspace& w) { return w.announce_key(arg(node)); });
}

pl_status pl_share(pl_workspace* ws, const char* node, const char* user, const char* recipients, char** out) {
  return with_workspace(ws, out, [&](Workspace& w) {
    std::vector<std::string> to;
    std::string cur;
    for (char c : arg(recipients) + ",") {
      if (c == ',') {
        auto b = cur.find_first_not_of(' ');
        if (b != std::string::npos) to.push_back(cur.substr(b, cur.find_last_not_of(' ') - b + 1));
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    return w.share(arg(node), arg(user), to);
  });
}

pl_status pl_import(pl_workspace* ws, const char* node, const char* item_id, char** out) {
  return with_workspace(ws, out, [&](Workspace& w) { return w.import_item(arg(node), arg(item_id)); });
}

pl_status pl_ingest(pl_workspace* ws, const char* node, const char* document, char** out) {
  return with_workspace(ws, out, [&](Workspace& w) { return w.ingest(arg(node), arg(document)); });
}

pl_status pl_consent(pl_workspace* ws, const char* node, const char* action, const char* user, const char* grantee,
                     const char* fields, char** out) {
  return with_workspace(ws, out, [&](Workspace& w) {
    return w.consent(arg(node), arg(action), arg(user), arg(grantee), arg(fields));
  });
}

pl_status pl_stop(pl_workspace* ws, const char* node, char** out) {
  return with_workspace(ws, out, [&](Workspace& w) { return w.stop(arg(node)); });
}

pl_status pl_validate_snapshot(const char* path, char** out) {
  return with_output(out, [&] { return permledger::validate_snapshot_file(arg(path)); });
}

pl_status pl_bench_run(const char* config_text, const char* out_dir, char** out) {
  return with_output(out, [&] {
    auto config = permledger::ScenarioConfig::parse(arg(config_text));
    auto result = permledger::run_bench(config, arg(out_dir).empty() ? "." : arg(out_dir));
    nlohmann::ordered_json j;
    j["config"] = config.to_text();
    j["latency"] = nlohmann::ordered_json::parse(result.latency.to_json());
    j["memory"] = nlohmann::ordered_json::parse(result.memory.to_json());
    auto files = nlohmann::ordered_json::array();
    for (const auto& f : result.files) files.push_back(f.string());
    j["files"] = std::move(files);
    return j.dump(2);
  });
}

pl_status pl_stats(const double* samples, size_t n, char** out) {
  return with_output(out, [&] {
    if (samples == nullptr && n > 0) throw Error(ErrorCode::Usage, "samples pointer is null");
    auto s = permledger::compute_stats(std::span<const double>(samples, n));
    nlohmann::ordered_json j;
    j["n"] = s.n;
    j["min"] = s.min;
    j["max"] = s.max;
    j["avg"] = s.avg;
    j["sd"] = s.sd;
    j["row"] = {{"N", std::to_string(s.n)},
                {"Min", permledger::format_2dp(s.min)},
                {"Max", permledger::format_2dp(s.max)},
                {"Avg.", permledger::format_2dp(s.avg)},
                {"SD", permledger::format_2dp(s.sd)}};
    return j.dump(2);
  });
}

}  // extern "C"
