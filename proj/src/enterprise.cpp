#include "permledger/enterprise.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "permledger/error.hpp"

namespace permledger {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxTextLength = 256;
constexpr std::size_t kMaxUserIdLength = 128;

std::optional<std::string>* text_field(UserProfile& p, std::string_view name) {
  if (name == "name") return &p.name;
  if (name == "nationality") return &p.nationality;
  if (name == "contact_number") return &p.contact_number;
  if (name == "purpose_of_visit") return &p.purpose_of_visit;
  return nullptr;
}

std::optional<Date>* date_field(UserProfile& p, std::string_view name) {
  if (name == "stay_from") return &p.stay_from;
  if (name == "stay_to") return &p.stay_to;
  return nullptr;
}

void require_known(std::string_view name) {
  if (!is_profile_field(name)) throw Error(ErrorCode::UnknownField, "unknown profile field '" + std::string(name) + "'");
}

std::string expect_string(const json& value, const std::string& field) {
  if (!value.is_string()) throw ProfileValidationError(field, "must be a string");
  return value.get<std::string>();
}

/// Fills profile fields from a parsed object. `lenient` treats empty values
/// as absent and accepts share_flags.
UserProfile profile_from_object(const json& doc, bool lenient) {
  if (!doc.is_object()) throw ProfileValidationError("document", "must be a JSON object");
  UserProfile p;
  bool have_user = false;
  for (const auto& [key, value] : doc.items()) {
    if (key == "format") {
      if (expect_string(value, key) != kProfileFormat) throw ProfileValidationError("format", "unsupported format tag");
      continue;
    }
    if (key == "user_id") {
      p.user_id = sanitize(expect_string(value, key));
      have_user = true;
      continue;
    }
    if (key == "share_flags" && lenient) {
      if (!value.is_object()) throw ProfileValidationError("share_flags", "must be an object");
      for (const auto& [flag, on] : value.items()) {
        require_known(flag);
        if (!on.is_boolean()) throw ProfileValidationError("share_flags", "values must be booleans");
        p.share_flags[flag] = on.get<bool>();
      }
      continue;
    }
    require_known(key);
    auto text = sanitize(expect_string(value, key));
    if (text.empty() && lenient) continue;
    if (auto* slot = text_field(p, key)) {
      *slot = std::move(text);
    } else {
      *date_field(p, key) = parse_date(key, text);
    }
  }
  if (!have_user) throw ProfileValidationError("user_id", "missing");
  if (!doc.contains("format") && !lenient) throw ProfileValidationError("format", "missing");
  return p;
}

json provenance_json(const Provenance& p) {
  json j;
  j["kind"] = p.kind == Provenance::Kind::Local ? "local" : "imported";
  if (p.kind == Provenance::Kind::Imported) {
    j["source"] = p.source.str();
    j["item_id"] = p.item_id;
  }
  return j;
}

Provenance provenance_from_json(const json& j) {
  Provenance p;
  auto kind = j.at("kind").get<std::string>();
  if (kind == "imported") {
    p.kind = Provenance::Kind::Imported;
    p.source = Address::parse_or_throw(j.at("source").get<std::string>());
    p.item_id = j.at("item_id").get<std::string>();
  } else if (kind != "local") {
    throw Error(ErrorCode::Decode, "unknown provenance kind '" + kind + "'");
  }
  return p;
}

}  // namespace

bool is_profile_field(std::string_view name) {
  return std::find(kProfileFields.begin(), kProfileFields.end(), name) != kProfileFields.end();
}

Date parse_date(std::string_view field, std::string_view text) {
  auto bad = [&] { return ProfileValidationError(std::string(field), "expected YYYY-MM-DD, got '" + std::string(text) + "'"); };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw bad();
  auto number = [&](std::size_t pos, std::size_t len) {
    unsigned v = 0;
    auto piece = text.substr(pos, len);
    if (!std::all_of(piece.begin(), piece.end(), [](char c) { return c >= '0' && c <= '9'; })) throw bad();
    std::from_chars(piece.data(), piece.data() + piece.size(), v);
    return v;
  };
  Date d{std::chrono::year(static_cast<int>(number(0, 4))), std::chrono::month(number(5, 2)),
         std::chrono::day(number(8, 2))};
  if (!d.ok()) throw bad();
  return d;
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

FieldSet UserProfile::present_fields() const {
  FieldSet out;
  for (auto name : kProfileFields) {
    if (field(name)) out.emplace(name);
  }
  return out;
}

std::optional<std::string> UserProfile::field(std::string_view name) const {
  auto& self = const_cast<UserProfile&>(*this);
  if (auto* slot = text_field(self, name)) return *slot;
  if (auto* slot = date_field(self, name)) {
    if (*slot) return format_date(**slot);
    return std::nullopt;
  }
  throw Error(ErrorCode::UnknownField, "unknown profile field '" + std::string(name) + "'");
}

UserProfile UserProfile::project(const FieldSet& fields) const {
  for (const auto& f : fields) require_known(f);
  UserProfile out;
  out.user_id = user_id;
  if (fields.contains("name")) out.name = name;
  if (fields.contains("nationality")) out.nationality = nationality;
  if (fields.contains("contact_number")) out.contact_number = contact_number;
  if (fields.contains("purpose_of_visit")) out.purpose_of_visit = purpose_of_visit;
  if (fields.contains("stay_from")) out.stay_from = stay_from;
  if (fields.contains("stay_to")) out.stay_to = stay_to;
  return out;
}

std::string sanitize(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    auto u = static_cast<unsigned char>(c);
    if (u < 0x20 || u == 0x7f) continue;
    out.push_back(c);
  }
  auto first = out.find_first_not_of(' ');
  if (first == std::string::npos) return {};
  auto last = out.find_last_not_of(' ');
  return out.substr(first, last - first + 1);
}

void validate_profile(const UserProfile& p, bool require_name) {
  if (p.user_id.empty()) throw ProfileValidationError("user_id", "must not be empty");
  if (p.user_id.size() > kMaxUserIdLength) throw ProfileValidationError("user_id", "too long");
  if (require_name && !p.name) throw ProfileValidationError("name", "missing");
  if (p.name && p.name->empty()) throw ProfileValidationError("name", "must not be empty");
  for (auto f : {"name", "nationality", "contact_number", "purpose_of_visit"}) {
    auto v = p.field(f);
    if (v && v->size() > kMaxTextLength) throw ProfileValidationError(f, "too long");
  }
  if (p.contact_number) {
    const auto& c = *p.contact_number;
    if (c.size() < 7 || c.size() > 20) throw ProfileValidationError("contact_number", "length must be 7-20");
    bool ok = std::all_of(c.begin(), c.end(), [](char ch) { return (ch >= '0' && ch <= '9') || ch == '+' || ch == '-' || ch == ' '; });
    if (!ok) throw ProfileValidationError("contact_number", "only digits, '+', '-' and spaces allowed");
  }
  if (p.stay_from && p.stay_to && *p.stay_to < *p.stay_from) {
    throw ProfileValidationError("stay_to", "earlier than stay_from");
  }
}

std::string to_open_format(const UserProfile& profile, const FieldSet& fields) {
  json doc = json::object();
  doc["format"] = kProfileFormat;
  doc["user_id"] = profile.user_id;
  for (const auto& f : fields) {
    require_known(f);
    if (auto v = profile.field(f)) doc[f] = *v;
  }
  return doc.dump();
}

UserProfile from_open_format(std::string_view document) {
  json doc = json::parse(document, nullptr, false);
  if (doc.is_discarded()) throw ProfileValidationError("document", "not valid JSON");
  auto p = profile_from_object(doc, false);
  validate_profile(p, false);
  return p;
}

const UserProfile& Repository::ingest(std::string_view raw_document) {
  json doc = json::parse(raw_document, nullptr, false);
  if (doc.is_discarded()) throw ProfileValidationError("document", "not valid JSON");
  auto p = profile_from_object(doc, true);
  validate_profile(p, true);
  for (auto f : kProfileFields) p.share_flags.try_emplace(std::string(f), false);
  auto id = p.user_id;
  records_[id] = StoredProfile{std::move(p), Provenance{}};
  return records_.find(id)->second.profile;
}

const StoredProfile* Repository::find(std::string_view user_id) const {
  auto it = records_.find(user_id);
  return it == records_.end() ? nullptr : &it->second;
}

void Repository::store(StoredProfile record) {
  auto id = record.profile.user_id;
  records_[id] = std::move(record);
}

std::string Repository::to_json() const {
  json recs = json::array();
  for (const auto& [id, rec] : records_) {
    json entry;
    entry["profile"] = json::parse(to_open_format(rec.profile, rec.profile.present_fields()));
    entry["share_flags"] = rec.profile.share_flags;
    entry["provenance"] = provenance_json(rec.provenance);
    recs.push_back(std::move(entry));
  }
  json root;
  root["format"] = "repository-v1";
  root["records"] = std::move(recs);
  return root.dump(2) + "\n";
}

Repository Repository::from_json(std::string_view text) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded() || !root.is_object() || root.value("format", "") != "repository-v1") {
    throw Error(ErrorCode::Decode, "not a repository file");
  }
  Repository repo;
  try {
    for (const auto& entry : root.at("records")) {
      StoredProfile rec;
      rec.profile = from_open_format(entry.at("profile").dump());
      rec.profile.share_flags = entry.at("share_flags").get<std::map<std::string, bool>>();
      rec.provenance = provenance_from_json(entry.at("provenance"));
      repo.store(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Decode, std::string("malformed repository: ") + e.what());
  }
  return repo;
}

Repository Repository::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return {};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void Repository::save(const std::filesystem::path& path) const {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out << to_json();
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

FieldSet publishable_fields(const Repository& repo, const ChainState& state, const std::string& user_id,
                            std::span<const Address> recipients) {
  const auto* rec = repo.find(user_id);
  if (rec == nullptr) throw Error(ErrorCode::NotFound, "no profile for user " + user_id);
  FieldSet result = rec->profile.present_fields();
  for (const auto& r : recipients) {
    auto allowed = consented_fields(state.consent(), user_id, r.str());
    FieldSet kept;
    std::set_intersection(result.begin(), result.end(), allowed.begin(), allowed.end(),
                          std::inserter(kept, kept.end()));
    if (kept.empty()) {
      throw ConsentDeniedError(user_id, r.str(), std::vector<std::string>(result.begin(), result.end()));
    }
    result = std::move(kept);
  }
  return result;
}

ShareResult publish_profile(const Repository& repo, Wallet& wallet, const ChainState& state,
                            const std::string& user_id, std::span<const Address> recipients) {
  auto fields = publishable_fields(repo, state, user_id, recipients);
  auto document = to_open_format(repo.find(user_id)->profile, fields);
  return share_data(wallet, state, as_bytes(document), recipients, ConsentScope{user_id, fields});
}

const UserProfile& import_profile(Repository& repo, const NodeIdentity& reader, const ChainState& state,
                                  const StreamView& view, std::string_view item_id) {
  auto plaintext = read_shared(reader, state, view, item_id);
  auto profile = from_open_format(to_string(plaintext));
  StoredProfile rec{std::move(profile),
                    Provenance{Provenance::Kind::Imported, shared_item_owner(state, item_id), std::string(item_id)}};
  auto id = rec.profile.user_id;
  repo.store(std::move(rec));
  return repo.find(id)->profile;
}

}  // namespace permledger
