#include "toolseek/registry.hpp"

#include <array>
#include <set>

#include "toolseek/text.hpp"

namespace toolseek {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 10> kRecordFields = {
    "name", "description", "homepage_url", "webmaster_email", "category_ids",
    "spec", "publications", "status",      "link_history",    "rrid",
};
constexpr std::array<std::string_view, 6> kImmutableFields = {
    "accession", "created_at", "updated_at", "link_history", "versions", "audit",
};
constexpr std::array<std::string_view, 9> kStringFields = {
    "name",          "description",     "homepage_url",   "webmaster_email", "status",
    "spec.software_type", "spec.license", "spec.stability", "spec.maintained",
};
constexpr std::array<std::string_view, 2> kNullableStringFields = {"rrid", "spec.computer_skills"};
constexpr std::array<std::string_view, 9> kSpecFields = {
    "software_type", "interfaces", "operating_systems", "programming_languages", "license",
    "computer_skills", "stability", "maintained", "external_links",
};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& names, std::string_view value) {
  for (auto n : names)
    if (n == value) return true;
  return false;
}

std::string value_text(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_null()) return {};
  return value.dump();
}

json text_value(std::string_view path, const std::string& text) {
  if (contains(kStringFields, path)) return text;
  if (contains(kNullableStringFields, path)) return text.empty() ? json(nullptr) : json(text);
  if (text.empty()) return nullptr;
  return json::parse(text);
}

[[noreturn]] void invalid(std::string_view path, const std::string& what) {
  throw Error(ErrorCode::ValidationFailed, std::string(path) + ": " + what, std::string(path));
}

const std::string& require_string(std::string_view path, const json& value) {
  if (!value.is_string()) invalid(path, "expected a string");
  return value.get_ref<const std::string&>();
}

// Validates and stores `value` into the field at `path`. Category and enum
// problems surface as ValidationFailed, URL/e-mail as InvalidUrl/InvalidEmail.
void assign_field(ToolCard& card, std::string_view path, const json& value, const TerminologyGraph& graph) {
  if (is_immutable_field(path)) {
    throw Error(ErrorCode::ImmutableField, "field '" + std::string(path) + "' cannot be edited", std::string(path));
  }
  try {
    if (path == "name") {
      const auto& name = require_string(path, value);
      if (normalize_tokens(name).empty()) invalid(path, "name must not be empty");
      card.name = name;
    } else if (path == "description") {
      card.description = require_string(path, value);
    } else if (path == "homepage_url") {
      const auto& url = require_string(path, value);
      if (!is_valid_url(url)) throw Error(ErrorCode::InvalidUrl, "invalid URL '" + url + "'", "homepage_url");
      card.homepage_url = url;
    } else if (path == "webmaster_email") {
      const auto& email = require_string(path, value);
      if (!is_valid_email(email)) {
        throw Error(ErrorCode::InvalidEmail, "invalid e-mail '" + email + "'", "webmaster_email");
      }
      card.webmaster_email = email;
    } else if (path == "category_ids") {
      if (!value.is_array()) invalid(path, "expected an array of category ids");
      std::set<CategoryId> ids;
      for (const auto& v : value) {
        const auto& id = require_string(path, v);
        if (!graph.has_category(id)) invalid(path, "unknown category '" + id + "'");
        ids.insert(id);
      }
      card.category_ids = std::move(ids);
    } else if (path == "status") {
      auto status = parse_card_status(require_string(path, value));
      if (!status) invalid(path, "unknown status '" + value.get<std::string>() + "'");
      card.status = *status;
    } else if (path == "rrid") {
      if (value.is_null()) {
        card.rrid.reset();
      } else {
        card.rrid = require_string(path, value);
      }
    } else if (path == "spec") {
      card.spec = spec_from_json(value);
    } else if (path.substr(0, 5) == "spec.") {
      const auto key = path.substr(5);
      if (!contains(kSpecFields, key)) invalid(path, "not an editable field");
      json spec = spec_to_json(card.spec);
      spec[std::string(key)] = value;
      card.spec = spec_from_json(spec);
    } else if (path == "publications") {
      if (!value.is_array()) invalid(path, "expected an array");
      std::vector<Publication> pubs;
      for (const auto& p : value) pubs.push_back(publication_from_json(p));
      card.publications = std::move(pubs);
    } else {
      invalid(path, "not an editable field");
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MalformedDocument || e.code() == ErrorCode::UnknownField ||
        e.code() == ErrorCode::UnknownRole) {
      throw Error(ErrorCode::ValidationFailed, e.what(), std::string(path));
    }
    throw;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ValidationFailed, std::string(path) + ": " + e.what(), std::string(path));
  }
}

json audit_record(const Accession& accession, const AuditEntry& entry) {
  json doc = audit_to_json(entry);
  doc["accession"] = accession.str();
  return doc;
}

}  // namespace

std::string_view to_string(Role role) {
  switch (role) {
    case Role::Member: return "member";
    case Role::Biocurator: return "biocurator";
    case Role::Admin: return "admin";
  }
  return "member";
}

std::optional<Role> parse_role(std::string_view text) {
  if (text == "member") return Role::Member;
  if (text == "biocurator") return Role::Biocurator;
  if (text == "admin") return Role::Admin;
  return std::nullopt;
}

bool is_immutable_field(std::string_view field_path) { return contains(kImmutableFields, field_path); }

json field_value(const ToolCard& card, std::string_view path) {
  if (path == "accession") return card.accession.str();
  if (path == "created_at") return format_timestamp(card.created_at);
  if (path == "updated_at") return format_timestamp(card.updated_at);
  const json doc = card_to_json(card);
  if (path.substr(0, 5) == "spec.") {
    const auto key = std::string(path.substr(5));
    if (!contains(kSpecFields, key)) invalid(path, "not a field");
    return doc.at("spec").at(key);
  }
  auto it = doc.find(std::string(path));
  if (it == doc.end()) invalid(path, "not a field");
  return *it;
}

void replay_audit_entry(ToolCard& card, const AuditEntry& entry, const TerminologyGraph& graph) {
  assign_field(card, entry.field_path, text_value(entry.field_path, entry.new_value), graph);
  card.updated_at = entry.at;
}

Registry::Registry(std::shared_ptr<const TerminologyGraph> graph, std::shared_ptr<DocumentStore> store,
                   std::shared_ptr<MintingClient> minter, Clock clock)
    : graph_(std::move(graph)),
      store_(std::move(store)),
      minter_(std::move(minter)),
      clock_(std::move(clock)) {
  accessions_ = std::make_unique<AccessionAllocator>();
  if (auto counter = store_->accession_counter_path()) accessions_ = std::make_unique<AccessionAllocator>(*counter);
  for (const auto& [key, text] : store_->list("cards")) {
    ToolCard card;
    try {
      card = card_from_json(json::parse(text));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::StorageFailure, "corrupt card document " + key + ": " + e.what());
    }
    accessions_->observe(card.accession);
    names_.emplace(normalize_key(card.name), card.accession);
    cards_.emplace(card.accession, std::move(card));
  }
  for (const auto& line : store_->read_log("audit")) {
    const auto doc = json::parse(line);
    audit_[Accession::parse(doc.at("accession").get<std::string>())].push_back(audit_from_json(doc));
  }
}

void Registry::set_change_listener(ChangeListener listener) {
  std::lock_guard lock(writer_);
  listener_ = std::move(listener);
}

std::shared_ptr<const TerminologyGraph> Registry::terminology() const { return graph_; }

void Registry::check_categories(const std::set<CategoryId>& ids, ErrorCode code) const {
  for (const auto& id : ids) {
    if (!graph_->has_category(id)) throw Error(code, "unknown category '" + id + "'", id);
  }
}

void Registry::check_unique_name(std::string_view name, const std::optional<Accession>& self) const {
  std::shared_lock lock(state_mutex_);
  auto it = names_.find(normalize_key(name));
  if (it != names_.end() && (!self || it->second != *self)) {
    throw Error(ErrorCode::DuplicateName, "a tool named '" + std::string(name) + "' already exists", "name");
  }
}

ToolCard Registry::parse_record(const json& doc, bool lenient, std::vector<std::string>& warnings) const {
  if (!doc.is_object()) throw Error(ErrorCode::MalformedDocument, "record must be an object");
  json record = json::object();
  for (const auto& [key, value] : doc.items()) {
    if (contains(kRecordFields, key)) {
      record[key] = value;
    } else if (lenient) {
      warnings.push_back(key);
    } else {
      throw Error(ErrorCode::UnknownField, "unknown field '" + key + "'", key);
    }
  }
  if (lenient && record.contains("spec") && record["spec"].is_object()) {
    json spec = json::object();
    for (const auto& [key, value] : record["spec"].items()) {
      if (contains(kSpecFields, key)) {
        spec[key] = value;
      } else {
        warnings.push_back("spec." + key);
      }
    }
    record["spec"] = std::move(spec);
  }

  auto text = [&](const char* key) -> std::string {
    auto it = record.find(key);
    if (it == record.end() || it->is_null()) return {};
    if (!it->is_string()) throw Error(ErrorCode::MalformedDocument, std::string(key) + " must be a string", key);
    return it->get<std::string>();
  };

  ToolCard card;
  card.name = text("name");
  if (normalize_tokens(card.name).empty()) throw Error(ErrorCode::MissingField, "missing field 'name'", "name");
  card.homepage_url = text("homepage_url");
  if (card.homepage_url.empty()) {
    throw Error(ErrorCode::MissingField, "missing field 'homepage_url'", "homepage_url");
  }
  if (!is_valid_url(card.homepage_url)) {
    throw Error(ErrorCode::InvalidUrl, "invalid URL '" + card.homepage_url + "'", "homepage_url");
  }
  card.description = text("description");
  card.webmaster_email = text("webmaster_email");
  if (!card.webmaster_email.empty() && !is_valid_email(card.webmaster_email)) {
    throw Error(ErrorCode::InvalidEmail, "invalid e-mail '" + card.webmaster_email + "'", "webmaster_email");
  }
  if (auto it = record.find("category_ids"); it != record.end() && !it->is_null()) {
    if (!it->is_array()) throw Error(ErrorCode::MalformedDocument, "category_ids must be an array", "category_ids");
    for (const auto& v : *it) {
      if (!v.is_string()) throw Error(ErrorCode::MalformedDocument, "category ids must be strings", "category_ids");
      card.category_ids.insert(v.get<std::string>());
    }
  }
  check_categories(card.category_ids, ErrorCode::UnknownCategory);
  if (auto it = record.find("spec"); it != record.end() && !it->is_null()) card.spec = spec_from_json(*it);
  if (auto it = record.find("publications"); it != record.end() && !it->is_null()) {
    if (!it->is_array()) throw Error(ErrorCode::MalformedDocument, "publications must be an array", "publications");
    for (const auto& p : *it) card.publications.push_back(publication_from_json(p));
  }
  if (auto it = record.find("link_history"); it != record.end() && !it->is_null()) {
    if (!it->is_array()) throw Error(ErrorCode::MalformedDocument, "link_history must be an array", "link_history");
    for (const auto& p : *it) card.link_history.push_back(probe_from_json(p));
  }
  card.status = CardStatus::Published;
  if (auto s = text("status"); !s.empty()) {
    auto status = parse_card_status(s);
    if (!status) throw Error(ErrorCode::ValidationFailed, "unknown status '" + s + "'", "status");
    card.status = *status;
  }
  if (auto r = text("rrid"); !r.empty()) card.rrid = r;
  return card;
}

IngestReport Registry::ingest_records(std::istream& records, bool lenient) {
  IngestReport report;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(records, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      std::vector<std::string> warnings;
      json doc;
      try {
        doc = json::parse(line);
      } catch (const json::parse_error& e) {
        throw Error(ErrorCode::MalformedDocument, e.what());
      }
      ToolCard card = parse_record(doc, lenient, warnings);

      std::lock_guard writer(writer_);
      check_unique_name(card.name, std::nullopt);
      card.accession = accessions_->next();
      card.created_at = card.updated_at = clock_();
      report.accessions.push_back(card.accession);
      commit(std::move(card), {});
      ++report.accepted;
      for (auto& w : warnings) {
        report.warnings.push_back({line_no, ErrorCode::UnknownField, w, "unknown field '" + w + "' ignored"});
      }
    } catch (const Error& e) {
      report.rejected.push_back({line_no, e.code(), e.field(), e.what()});
    } catch (const json::exception& e) {
      report.rejected.push_back({line_no, ErrorCode::MalformedDocument, {}, e.what()});
    }
  }
  return report;
}

ToolCard Registry::submit_tool(std::string_view name, std::string_view description, std::string_view homepage_url,
                               std::string_view webmaster_email) {
  if (normalize_tokens(name).empty()) throw Error(ErrorCode::MissingField, "missing field 'name'", "name");
  if (description.empty()) throw Error(ErrorCode::MissingField, "missing field 'description'", "description");
  if (homepage_url.empty()) throw Error(ErrorCode::MissingField, "missing field 'homepage_url'", "homepage_url");
  if (!is_valid_url(homepage_url)) {
    throw Error(ErrorCode::InvalidUrl, "invalid URL '" + std::string(homepage_url) + "'", "homepage_url");
  }
  if (!is_valid_email(webmaster_email)) {
    throw Error(ErrorCode::InvalidEmail, "invalid e-mail '" + std::string(webmaster_email) + "'", "webmaster_email");
  }

  std::lock_guard writer(writer_);
  check_unique_name(name, std::nullopt);
  ToolCard card;
  card.accession = accessions_->next();
  card.name = name;
  card.description = description;
  card.homepage_url = homepage_url;
  card.webmaster_email = webmaster_email;
  card.status = CardStatus::Draft;
  card.created_at = card.updated_at = clock_();
  commit(card, {});
  return card;
}

ToolCard& Registry::mutable_card(const Accession& accession) {
  auto it = cards_.find(accession);
  if (it == cards_.end()) throw Error(ErrorCode::UnknownTool, "unknown tool " + accession.str(), accession.str());
  return it->second;
}

ToolCard Registry::apply_edit(const Accession& accession, std::string_view field_path, const json& new_value,
                              const Editor& editor) {
  std::lock_guard writer(writer_);
  ToolCard card;
  {
    std::shared_lock lock(state_mutex_);
    card = mutable_card(accession);
  }
  if (is_immutable_field(field_path)) {
    throw Error(ErrorCode::ImmutableField, "field '" + std::string(field_path) + "' cannot be edited",
                std::string(field_path));
  }
  const json old_value = field_value(card, field_path);
  if (field_path == "status" && editor.role == Role::Member) {
    throw Error(ErrorCode::Forbidden, "only biocurators may change a card's status", "status");
  }
  assign_field(card, field_path, new_value, *graph_);
  if (field_path == "name") check_unique_name(card.name, accession);

  AuditEntry entry{editor.user_id, clock_(), std::string(field_path), value_text(old_value),
                   value_text(field_value(card, field_path))};
  card.updated_at = entry.at;
  commit(card, {std::move(entry)});
  return card;
}

CodeVersion Registry::add_version(const Accession& accession, std::string_view version_label,
                                  std::string_view operating_system, std::string_view architecture,
                                  std::optional<std::size_t> linked_publication, std::string_view payload) {
  std::lock_guard writer(writer_);
  ToolCard card;
  {
    std::shared_lock lock(state_mutex_);
    card = mutable_card(accession);
  }
  if (version_label.empty()) {
    throw Error(ErrorCode::InvalidVersionLabel, "version label must not be empty", "version_label");
  }
  const auto sanitized = sanitize_version_label(version_label);
  for (const auto& v : card.versions) {
    if (v.version_label == version_label || sanitize_version_label(v.version_label) == sanitized) {
      throw Error(ErrorCode::DuplicateVersion,
                  "version '" + std::string(version_label) + "' already exists on " + accession.str(), "version_label");
    }
  }
  if (linked_publication && *linked_publication >= card.publications.size()) {
    throw Error(ErrorCode::UnknownPublication, "publication #" + std::to_string(*linked_publication) + " does not exist",
                "linked_publication");
  }

  const auto digest = sha256_hex(payload);
  const Doi doi = mint_doi(accession, version_label, *minter_, digest);
  store_->put_blob(payload);

  CodeVersion version;
  version.version_label = version_label;
  version.operating_system = operating_system;
  version.architecture = architecture;
  version.linked_publication = linked_publication;
  version.doi = doi.str();
  version.uploaded_at = clock_();
  version.payload_digest = digest;
  card.versions.push_back(version);
  card.updated_at = version.uploaded_at;
  commit(std::move(card), {});
  return version;
}

ToolCard Registry::get_tool(const Accession& accession, bool as_editor) const {
  std::shared_lock lock(state_mutex_);
  auto it = cards_.find(accession);
  if (it == cards_.end() || (it->second.status == CardStatus::Draft && !as_editor)) {
    throw Error(ErrorCode::UnknownTool, "unknown tool " + accession.str(), accession.str());
  }
  return it->second;
}

std::optional<ToolCard> Registry::find_tool(const Accession& accession) const {
  std::shared_lock lock(state_mutex_);
  auto it = cards_.find(accession);
  if (it == cards_.end()) return std::nullopt;
  return it->second;
}

std::optional<Accession> Registry::find_by_name(std::string_view name) const {
  std::shared_lock lock(state_mutex_);
  auto it = names_.find(normalize_key(name));
  if (it == names_.end()) return std::nullopt;
  return it->second;
}

std::vector<ToolCard> Registry::cards() const {
  std::shared_lock lock(state_mutex_);
  std::vector<ToolCard> out;
  out.reserve(cards_.size());
  for (const auto& [acc, card] : cards_) out.push_back(card);
  return out;
}

std::size_t Registry::size() const {
  std::shared_lock lock(state_mutex_);
  return cards_.size();
}

std::vector<AuditEntry> Registry::audit_log(const Accession& accession) const {
  std::shared_lock lock(state_mutex_);
  auto it = audit_.find(accession);
  return it == audit_.end() ? std::vector<AuditEntry>{} : it->second;
}

std::uint64_t Registry::sequence() const {
  std::shared_lock lock(state_mutex_);
  return sequence_;
}

std::optional<CardStatus> Registry::record_probe(
    const Accession& accession, const LinkProbe& probe,
    const std::function<CardStatus(const std::vector<LinkProbe>&)>& classify) {
  std::lock_guard writer(writer_);
  ToolCard card;
  {
    std::shared_lock lock(state_mutex_);
    card = mutable_card(accession);
  }
  card.link_history.push_back(probe);
  std::vector<AuditEntry> audit;
  std::optional<CardStatus> changed;
  if (card.status != CardStatus::Draft) {
    const CardStatus next = classify(card.link_history);
    if (next != card.status) {
      audit.push_back({std::string(kLinkCheckEditor), clock_(), "status", std::string(to_string(card.status)),
                       std::string(to_string(next))});
      card.status = next;
      card.updated_at = audit.back().at;
      changed = next;
    }
  }
  commit(std::move(card), std::move(audit));
  return changed;
}

Publication Registry::set_credit_badges(const Accession& accession, std::size_t publication_index,
                                        const UserId& user, const std::set<CreditRole>& roles) {
  std::lock_guard writer(writer_);
  ToolCard card;
  {
    std::shared_lock lock(state_mutex_);
    card = mutable_card(accession);
  }
  if (publication_index >= card.publications.size()) {
    throw Error(ErrorCode::UnknownPublication, "publication #" + std::to_string(publication_index) + " does not exist",
                "publication");
  }
  auto& pub = card.publications[publication_index];
  if (pub.credit_badges[user] == roles) return pub;
  pub.credit_badges[user] = roles;
  Publication result = pub;
  commit(std::move(card), {});
  return result;
}

void Registry::commit(ToolCard card, std::vector<AuditEntry> audit) {
  store_->put("cards", card.accession.str(), card_to_json(card).dump(2) + "\n");
  for (const auto& entry : audit) store_->append_log("audit", audit_record(card.accession, entry).dump());

  std::uint64_t sequence = 0;
  {
    std::unique_lock lock(state_mutex_);
    auto existing = cards_.find(card.accession);
    if (existing != cards_.end()) names_.erase(normalize_key(existing->second.name));
    names_[normalize_key(card.name)] = card.accession;
    auto& log = audit_[card.accession];
    log.insert(log.end(), audit.begin(), audit.end());
    cards_.insert_or_assign(card.accession, card);
    sequence = ++sequence_;
  }
  if (listener_) listener_(card, sequence);
}

}  // namespace toolseek
