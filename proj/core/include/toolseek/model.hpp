#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "toolseek/identifiers.hpp"
#include "toolseek/terminology.hpp"
#include "toolseek/time.hpp"

namespace toolseek {

using UserId = std::string;

enum class Interface { CommandLine, WebInterface, GraphicalInterface };
enum class ComputerSkills { Basic, Medium, Advanced };
enum class Stability { Stable, Beta, Alpha, Unknown };
enum class Maintained { Yes, No, Unknown };
enum class CardStatus { Draft, Published, Obsolete };
enum class LinkOutcome { Alive, Broken, Unreachable };

// The 14 contributor roles of the CRediT taxonomy.
enum class CreditRole {
  Conceptualization,
  DataCuration,
  FormalAnalysis,
  FundingAcquisition,
  Investigation,
  Methodology,
  ProjectAdministration,
  Resources,
  Software,
  Supervision,
  Validation,
  Visualization,
  WritingOriginalDraft,
  WritingReviewEditing,
};
inline constexpr std::size_t kCreditRoleCount = 14;

std::string_view to_string(Interface v);
std::string_view to_string(ComputerSkills v);
std::string_view to_string(Stability v);
std::string_view to_string(Maintained v);
std::string_view to_string(CardStatus v);
std::string_view to_string(LinkOutcome v);
std::string_view to_string(CreditRole v);

std::optional<Interface> parse_interface(std::string_view text);
std::optional<ComputerSkills> parse_computer_skills(std::string_view text);
std::optional<Stability> parse_stability(std::string_view text);
std::optional<Maintained> parse_maintained(std::string_view text);
std::optional<CardStatus> parse_card_status(std::string_view text);
std::optional<LinkOutcome> parse_link_outcome(std::string_view text);
std::optional<CreditRole> parse_credit_role(std::string_view text);
const std::vector<CreditRole>& all_credit_roles();

// Syntactic checks only: http(s) scheme with a host; local@domain.tld.
bool is_valid_url(std::string_view text);
bool is_valid_email(std::string_view text);

struct Specification {
  std::string software_type;
  std::set<Interface> interfaces;
  // "Linux", "Mac", "Windows", or free text for anything else.
  std::set<std::string> operating_systems;
  std::set<std::string> programming_languages;
  std::string license;
  std::optional<ComputerSkills> computer_skills;
  Stability stability = Stability::Unknown;
  Maintained maintained = Maintained::Unknown;
  std::map<std::string, std::string> external_links;

  bool operator==(const Specification&) const = default;
};

struct Publication {
  std::optional<std::string> doi;
  std::optional<std::string> pmid;
  std::string title;
  std::optional<int> year;
  std::map<UserId, std::set<CreditRole>> credit_badges;

  bool operator==(const Publication&) const = default;
};

struct CodeVersion {
  std::string version_label;
  std::string operating_system;
  std::string architecture;
  std::optional<std::size_t> linked_publication;
  std::string doi;
  Timestamp uploaded_at{};
  std::string payload_digest;

  bool operator==(const CodeVersion&) const = default;
};

struct LinkProbe {
  Timestamp at{};
  LinkOutcome outcome = LinkOutcome::Unreachable;
  std::optional<int> http_status;
  std::chrono::milliseconds latency{0};

  bool operator==(const LinkProbe&) const = default;
};

struct AuditEntry {
  UserId editor;
  Timestamp at{};
  std::string field_path;
  std::string old_value;
  std::string new_value;

  bool operator==(const AuditEntry&) const = default;
};

// Raw review tally for one tool; the ranking signal is derived from it.
struct RatingSummary {
  long sum = 0;
  std::size_t count = 0;

  bool operator==(const RatingSummary&) const = default;
};

struct ToolCard {
  Accession accession;
  std::string name;
  std::string description;
  std::string homepage_url;
  std::string webmaster_email;
  std::set<CategoryId> category_ids;
  Specification spec;
  std::vector<Publication> publications;
  std::vector<CodeVersion> versions;
  std::vector<LinkProbe> link_history;
  CardStatus status = CardStatus::Draft;
  std::optional<std::string> rrid;
  Timestamp created_at{};
  Timestamp updated_at{};

  bool operator==(const ToolCard&) const = default;
};

// Full stored form of a card (every field, stable key order).
nlohmann::json card_to_json(const ToolCard& card);
// Throws Error(MalformedDocument) on structural problems.
ToolCard card_from_json(const nlohmann::json& doc);

nlohmann::json spec_to_json(const Specification& spec);
Specification spec_from_json(const nlohmann::json& doc);
nlohmann::json publication_to_json(const Publication& pub);
Publication publication_from_json(const nlohmann::json& doc);
nlohmann::json version_to_json(const CodeVersion& version);
nlohmann::json probe_to_json(const LinkProbe& probe);
LinkProbe probe_from_json(const nlohmann::json& doc);
nlohmann::json audit_to_json(const AuditEntry& entry);
AuditEntry audit_from_json(const nlohmann::json& doc);

}  // namespace toolseek
