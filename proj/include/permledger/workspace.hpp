#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "permledger/consortium.hpp"

namespace permledger {

/// A consortium persisted in a chain directory:
///
///   params.conf            chain parameters
///   chain.snap             every block (replayed from genesis on open)
///   workspace.json         founder name
///   keys/<name>.key        identity seeds
///   nodes/<name>/subscriptions.json, repo.json, stopped
///
/// Command methods return JSON text describing the result.
class Workspace {
 public:
  /// Throws Error(Io) if the directory already holds a chain.
  static Workspace create(const std::filesystem::path& dir, std::string_view params_text,
                          const std::string& founder, std::optional<std::string> seed);
  /// Replays chain.snap from genesis. Throws ValidationError on a bad chain.
  static Workspace open(const std::filesystem::path& dir);

  const std::filesystem::path& dir() const { return dir_; }
  Consortium& consortium() { return consortium_; }
  const std::string& founder() const { return founder_; }
  /// Persists blocks, keys, subscriptions and repositories.
  void save() const;

  std::string summary() const;
  std::string create_identity(const std::string& name, std::optional<std::string> seed);
  std::string list_identities() const;
  std::string grant(const std::string& node, const std::string& target, const std::string& flags, bool revoke);
  std::string create_stream(const std::string& node, const std::string& name, bool open);
  std::string publish(const std::string& node, const std::string& stream, const std::string& key, Bytes data);
  std::string subscribe(const std::string& node, const std::string& stream);
  std::string list_streams(const std::string& node);
  std::string get_items(const std::string& node, const std::string& stream, std::optional<std::string> key,
                        std::optional<std::string> publisher);
  std::string announce_key(const std::string& node);
  std::string share(const std::string& node, const std::string& user, const std::vector<std::string>& to);
  std::string import_item(const std::string& node, const std::string& item_id);
  std::string ingest(const std::string& node, std::string_view document);
  std::string consent(const std::string& relay, const std::string& kind, const std::string& user,
                      const std::string& grantee, const std::string& fields);
  std::string validate() const;
  std::string stop(const std::string& node);

 private:
  Workspace(std::filesystem::path dir, Consortium consortium, std::string founder)
      : dir_(std::move(dir)), consortium_(std::move(consortium)), founder_(std::move(founder)) {}

  /// Resolves the default node and brings a stopped node back online.
  Member& node(const std::string& name);

  std::filesystem::path dir_;
  Consortium consortium_;
  std::string founder_;
  std::vector<std::string> restarted_;
};

/// Validates a snapshot file on its own. Returns JSON text.
std::string validate_snapshot_file(const std::filesystem::path& path);

}  // namespace permledger
