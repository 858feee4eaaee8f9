#include "toolseek/model.hpp"

#include <array>
#include <utility>

#include "toolseek/error.hpp"

namespace toolseek {

using nlohmann::json;

namespace {

template <typename E, std::size_t N>
using NameTable = std::array<std::pair<E, std::string_view>, N>;

constexpr NameTable<Interface, 3> kInterfaces{{
    {Interface::CommandLine, "command-line"},
    {Interface::WebInterface, "web-interface"},
    {Interface::GraphicalInterface, "graphical-interface"},
}};
constexpr NameTable<ComputerSkills, 3> kSkills{{
    {ComputerSkills::Basic, "basic"}, {ComputerSkills::Medium, "medium"}, {ComputerSkills::Advanced, "advanced"},
}};
constexpr NameTable<Stability, 4> kStability{{
    {Stability::Stable, "stable"}, {Stability::Beta, "beta"}, {Stability::Alpha, "alpha"}, {Stability::Unknown, "unknown"},
}};
constexpr NameTable<Maintained, 3> kMaintained{{
    {Maintained::Yes, "yes"}, {Maintained::No, "no"}, {Maintained::Unknown, "unknown"},
}};
constexpr NameTable<CardStatus, 3> kStatus{{
    {CardStatus::Draft, "draft"}, {CardStatus::Published, "published"}, {CardStatus::Obsolete, "obsolete"},
}};
constexpr NameTable<LinkOutcome, 3> kOutcomes{{
    {LinkOutcome::Alive, "alive"}, {LinkOutcome::Broken, "broken"}, {LinkOutcome::Unreachable, "unreachable"},
}};
constexpr NameTable<CreditRole, kCreditRoleCount> kRoles{{
    {CreditRole::Conceptualization, "Conceptualization"},
    {CreditRole::DataCuration, "Data curation"},
    {CreditRole::FormalAnalysis, "Formal analysis"},
    {CreditRole::FundingAcquisition, "Funding acquisition"},
    {CreditRole::Investigation, "Investigation"},
    {CreditRole::Methodology, "Methodology"},
    {CreditRole::ProjectAdministration, "Project administration"},
    {CreditRole::Resources, "Resources"},
    {CreditRole::Software, "Software"},
    {CreditRole::Supervision, "Supervision"},
    {CreditRole::Validation, "Validation"},
    {CreditRole::Visualization, "Visualization"},
    {CreditRole::WritingOriginalDraft, "Writing \xE2\x80\x93 original draft"},
    {CreditRole::WritingReviewEditing, "Writing \xE2\x80\x93 review & editing"},
}};

template <typename E, std::size_t N>
std::string_view name_of(const NameTable<E, N>& table, E value) {
  for (const auto& [v, name] : table)
    if (v == value) return name;
  return {};
}

template <typename E, std::size_t N>
std::optional<E> value_of(const NameTable<E, N>& table, std::string_view text) {
  for (const auto& [v, name] : table)
    if (name == text) return v;
  return std::nullopt;
}

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::MalformedDocument, "malformed card document: " + what);
}

[[noreturn]] void bad_value(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ValidationFailed, field + ": " + what, field);
}

std::string get_string(const json& doc, const char* key, bool required = false) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) {
    if (required) malformed(std::string("missing '") + key + "'");
    return {};
  }
  if (!it->is_string()) malformed(std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

std::optional<std::string> get_optional_string(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) malformed(std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

std::set<std::string> get_string_set(const json& doc, const char* key) {
  std::set<std::string> out;
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return out;
  if (!it->is_array()) malformed(std::string("'") + key + "' must be an array");
  for (const auto& v : *it) {
    if (!v.is_string()) malformed(std::string("'") + key + "' must hold strings");
    out.insert(v.get<std::string>());
  }
  return out;
}

Timestamp get_timestamp(const json& doc, const char* key) {
  auto text = get_string(doc, key);
  return text.empty() ? Timestamp{} : parse_timestamp(text);
}

}  // namespace

std::string_view to_string(Interface v) { return name_of(kInterfaces, v); }
std::string_view to_string(ComputerSkills v) { return name_of(kSkills, v); }
std::string_view to_string(Stability v) { return name_of(kStability, v); }
std::string_view to_string(Maintained v) { return name_of(kMaintained, v); }
std::string_view to_string(CardStatus v) { return name_of(kStatus, v); }
std::string_view to_string(LinkOutcome v) { return name_of(kOutcomes, v); }
std::string_view to_string(CreditRole v) { return name_of(kRoles, v); }

std::optional<Interface> parse_interface(std::string_view t) { return value_of(kInterfaces, t); }
std::optional<ComputerSkills> parse_computer_skills(std::string_view t) { return value_of(kSkills, t); }
std::optional<Stability> parse_stability(std::string_view t) { return value_of(kStability, t); }
std::optional<Maintained> parse_maintained(std::string_view t) { return value_of(kMaintained, t); }
std::optional<CardStatus> parse_card_status(std::string_view t) { return value_of(kStatus, t); }
std::optional<LinkOutcome> parse_link_outcome(std::string_view t) { return value_of(kOutcomes, t); }
std::optional<CreditRole> parse_credit_role(std::string_view t) { return value_of(kRoles, t); }

const std::vector<CreditRole>& all_credit_roles() {
  static const std::vector<CreditRole> roles = [] {
    std::vector<CreditRole> out;
    for (const auto& [role, name] : kRoles) out.push_back(role);
    return out;
  }();
  return roles;
}

bool is_valid_url(std::string_view text) {
  std::string_view rest;
  if (text.substr(0, 7) == "http://") {
    rest = text.substr(7);
  } else if (text.substr(0, 8) == "https://") {
    rest = text.substr(8);
  } else {
    return false;
  }
  const auto host_end = rest.find_first_of("/?#");
  const auto authority = rest.substr(0, host_end);
  if (authority.empty()) return false;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (u <= 0x20 || u == 0x7F) return false;
  }
  auto host = authority;
  if (auto at = host.rfind('@'); at != std::string_view::npos) host = host.substr(at + 1);
  if (!host.empty() && host.front() == '[') return host.find(']') != std::string_view::npos;
  if (auto colon = host.rfind(':'); colon != std::string_view::npos) {
    auto port = host.substr(colon + 1);
    host = host.substr(0, colon);
    if (port.empty() || port.size() > 5) return false;
    for (char c : port)
      if (c < '0' || c > '9') return false;
  }
  if (host.empty() || host.front() == '.' || host.back() == '.') return false;
  for (char c : host) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                    c == '.' || static_cast<unsigned char>(c) >= 0x80;
    if (!ok) return false;
  }
  return true;
}

bool is_valid_email(std::string_view text) {
  const auto at = text.find('@');
  if (at == std::string_view::npos || at == 0 || text.find('@', at + 1) != std::string_view::npos) return false;
  const auto domain = text.substr(at + 1);
  const auto dot = domain.rfind('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 >= domain.size()) return false;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (u <= 0x20 || u == 0x7F || c == ',' || c == ';' || c == '<' || c == '>') return false;
  }
  return domain.front() != '.';
}

json spec_to_json(const Specification& spec) {
  json interfaces = json::array();
  for (auto i : spec.interfaces) interfaces.push_back(std::string(to_string(i)));
  json doc = {
      {"software_type", spec.software_type},
      {"interfaces", std::move(interfaces)},
      {"operating_systems", spec.operating_systems},
      {"programming_languages", spec.programming_languages},
      {"license", spec.license},
      {"stability", std::string(to_string(spec.stability))},
      {"maintained", std::string(to_string(spec.maintained))},
      {"external_links", spec.external_links},
  };
  doc["computer_skills"] = spec.computer_skills ? json(std::string(to_string(*spec.computer_skills))) : json(nullptr);
  return doc;
}

Specification spec_from_json(const json& doc) {
  if (!doc.is_object()) malformed("'spec' must be an object");
  for (const auto& [key, value] : doc.items()) {
    static const std::set<std::string> known = {"software_type", "interfaces", "operating_systems",
                                                "programming_languages", "license", "computer_skills",
                                                "stability", "maintained", "external_links"};
    if (!known.count(key)) throw Error(ErrorCode::UnknownField, "unknown field 'spec." + key + "'", "spec." + key);
  }
  Specification spec;
  spec.software_type = get_string(doc, "software_type");
  for (const auto& name : get_string_set(doc, "interfaces")) {
    auto v = parse_interface(name);
    if (!v) bad_value("spec.interfaces", "unknown interface '" + name + "'");
    spec.interfaces.insert(*v);
  }
  spec.operating_systems = get_string_set(doc, "operating_systems");
  for (const auto& os : spec.operating_systems)
    if (os.empty()) bad_value("spec.operating_systems", "empty operating system");
  spec.programming_languages = get_string_set(doc, "programming_languages");
  spec.license = get_string(doc, "license");
  if (auto s = get_optional_string(doc, "computer_skills")) {
    auto v = parse_computer_skills(*s);
    if (!v) bad_value("spec.computer_skills", "unknown value '" + *s + "'");
    spec.computer_skills = *v;
  }
  if (auto s = get_optional_string(doc, "stability")) {
    auto v = parse_stability(*s);
    if (!v) bad_value("spec.stability", "unknown value '" + *s + "'");
    spec.stability = *v;
  }
  if (auto s = get_optional_string(doc, "maintained")) {
    auto v = parse_maintained(*s);
    if (!v) bad_value("spec.maintained", "unknown value '" + *s + "'");
    spec.maintained = *v;
  }
  if (auto it = doc.find("external_links"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) malformed("'external_links' must be an object");
    for (const auto& [label, url] : it->items()) {
      if (!url.is_string() || !is_valid_url(url.get<std::string>())) {
        bad_value("spec.external_links", "link '" + label + "' is not a valid URL");
      }
      spec.external_links.emplace(label, url.get<std::string>());
    }
  }
  return spec;
}

json publication_to_json(const Publication& pub) {
  json badges = json::object();
  for (const auto& [user, roles] : pub.credit_badges) {
    json list = json::array();
    for (auto r : roles) list.push_back(std::string(to_string(r)));
    badges[user] = std::move(list);
  }
  json doc = {{"title", pub.title}, {"credit_badges", std::move(badges)}};
  doc["doi"] = pub.doi ? json(*pub.doi) : json(nullptr);
  doc["pmid"] = pub.pmid ? json(*pub.pmid) : json(nullptr);
  doc["year"] = pub.year ? json(*pub.year) : json(nullptr);
  return doc;
}

Publication publication_from_json(const json& doc) {
  if (!doc.is_object()) malformed("publication must be an object");
  Publication pub;
  pub.doi = get_optional_string(doc, "doi");
  pub.pmid = get_optional_string(doc, "pmid");
  pub.title = get_string(doc, "title");
  if (auto it = doc.find("year"); it != doc.end() && !it->is_null()) {
    if (!it->is_number_integer()) malformed("'year' must be an integer");
    pub.year = it->get<int>();
  }
  if (!pub.doi && !pub.pmid && pub.title.empty()) {
    bad_value("publications", "a publication needs a doi, a pmid or a title");
  }
  if (auto it = doc.find("credit_badges"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) malformed("'credit_badges' must be an object");
    for (const auto& [user, roles] : it->items()) {
      if (!roles.is_array()) malformed("credit badge roles must be an array");
      auto& set = pub.credit_badges[user];
      for (const auto& r : roles) {
        auto role = r.is_string() ? parse_credit_role(r.get<std::string>()) : std::nullopt;
        if (!role) throw Error(ErrorCode::UnknownRole, "unknown credit role " + r.dump(), "credit_badges");
        set.insert(*role);
      }
    }
  }
  return pub;
}

json probe_to_json(const LinkProbe& probe) {
  json doc = {{"at", format_timestamp(probe.at)},
              {"outcome", std::string(to_string(probe.outcome))},
              {"latency_ms", probe.latency.count()}};
  doc["http_status"] = probe.http_status ? json(*probe.http_status) : json(nullptr);
  return doc;
}

LinkProbe probe_from_json(const json& doc) {
  if (!doc.is_object()) malformed("link probe must be an object");
  LinkProbe probe;
  probe.at = get_timestamp(doc, "at");
  auto outcome = parse_link_outcome(get_string(doc, "outcome", true));
  if (!outcome) bad_value("link_history", "unknown outcome");
  probe.outcome = *outcome;
  if (auto it = doc.find("http_status"); it != doc.end() && !it->is_null()) probe.http_status = it->get<int>();
  if (auto it = doc.find("latency_ms"); it != doc.end() && it->is_number_integer()) {
    probe.latency = std::chrono::milliseconds(it->get<long long>());
  }
  return probe;
}

json audit_to_json(const AuditEntry& e) {
  return {{"editor", e.editor}, {"at", format_timestamp(e.at)}, {"field_path", e.field_path},
          {"old_value", e.old_value}, {"new_value", e.new_value}};
}

AuditEntry audit_from_json(const json& doc) {
  return {get_string(doc, "editor"), get_timestamp(doc, "at"), get_string(doc, "field_path"),
          get_string(doc, "old_value"), get_string(doc, "new_value")};
}

json version_to_json(const CodeVersion& v) {
  json item = {{"version_label", v.version_label}, {"operating_system", v.operating_system},
               {"architecture", v.architecture},   {"doi", v.doi},
               {"uploaded_at", format_timestamp(v.uploaded_at)}, {"payload_digest", v.payload_digest}};
  item["linked_publication"] = v.linked_publication ? json(*v.linked_publication) : json(nullptr);
  return item;
}

json card_to_json(const ToolCard& card) {
  json pubs = json::array();
  for (const auto& p : card.publications) pubs.push_back(publication_to_json(p));
  json versions = json::array();
  for (const auto& v : card.versions) versions.push_back(version_to_json(v));
  json history = json::array();
  for (const auto& p : card.link_history) history.push_back(probe_to_json(p));
  json doc = {
      {"accession", card.accession.str()},
      {"name", card.name},
      {"description", card.description},
      {"homepage_url", card.homepage_url},
      {"webmaster_email", card.webmaster_email},
      {"category_ids", card.category_ids},
      {"spec", spec_to_json(card.spec)},
      {"publications", std::move(pubs)},
      {"versions", std::move(versions)},
      {"link_history", std::move(history)},
      {"status", std::string(to_string(card.status))},
      {"created_at", format_timestamp(card.created_at)},
      {"updated_at", format_timestamp(card.updated_at)},
  };
  doc["rrid"] = card.rrid ? json(*card.rrid) : json(nullptr);
  return doc;
}

ToolCard card_from_json(const json& doc) {
  if (!doc.is_object()) malformed("card must be an object");
  ToolCard card;
  card.accession = Accession::parse(get_string(doc, "accession", true));
  card.name = get_string(doc, "name", true);
  card.description = get_string(doc, "description");
  card.homepage_url = get_string(doc, "homepage_url");
  card.webmaster_email = get_string(doc, "webmaster_email");
  card.category_ids = get_string_set(doc, "category_ids");
  if (auto it = doc.find("spec"); it != doc.end() && !it->is_null()) card.spec = spec_from_json(*it);
  if (auto it = doc.find("publications"); it != doc.end() && it->is_array()) {
    for (const auto& p : *it) card.publications.push_back(publication_from_json(p));
  }
  if (auto it = doc.find("versions"); it != doc.end() && it->is_array()) {
    for (const auto& v : *it) {
      CodeVersion cv;
      cv.version_label = get_string(v, "version_label", true);
      cv.operating_system = get_string(v, "operating_system");
      cv.architecture = get_string(v, "architecture");
      cv.doi = get_string(v, "doi");
      cv.uploaded_at = get_timestamp(v, "uploaded_at");
      cv.payload_digest = get_string(v, "payload_digest");
      if (auto lp = v.find("linked_publication"); lp != v.end() && !lp->is_null()) {
        cv.linked_publication = lp->get<std::size_t>();
      }
      card.versions.push_back(std::move(cv));
    }
  }
  if (auto it = doc.find("link_history"); it != doc.end() && it->is_array()) {
    for (const auto& p : *it) card.link_history.push_back(probe_from_json(p));
  }
  auto status = parse_card_status(get_string(doc, "status", true));
  if (!status) malformed("unknown status");
  card.status = *status;
  card.rrid = get_optional_string(doc, "rrid");
  card.created_at = get_timestamp(doc, "created_at");
  card.updated_at = get_timestamp(doc, "updated_at");
  return card;
}

}  // namespace toolseek
