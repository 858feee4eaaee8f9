#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "toolseek/error.hpp"
#include "toolseek/identifiers.hpp"
#include "toolseek/model.hpp"
#include "toolseek/store.hpp"
#include "toolseek/terminology.hpp"
#include "toolseek/time.hpp"

namespace toolseek {

enum class Role { Member, Biocurator, Admin };
std::string_view to_string(Role role);
std::optional<Role> parse_role(std::string_view text);

struct Editor {
  UserId user_id;
  Role role = Role::Member;
};

struct IngestRejection {
  std::size_t line = 0;
  ErrorCode code = ErrorCode::MalformedDocument;
  std::string field;
  std::string message;
};

struct IngestReport {
  std::size_t accepted = 0;
  std::vector<IngestRejection> rejected;
  // Lenient mode only: unknown fields that were dropped.
  std::vector<IngestRejection> warnings;
  std::vector<Accession> accessions;

  std::size_t records_read() const { return accepted + rejected.size(); }
};

// Editor id under which the link checker records status transitions.
inline constexpr std::string_view kLinkCheckEditor = "linkcheck";

// Fields that may never be edited through apply_edit.
bool is_immutable_field(std::string_view field_path);
// Current value of an editable field as JSON. Throws ValidationFailed for
// paths that are not fields.
nlohmann::json field_value(const ToolCard& card, std::string_view field_path);
// Applies the new_value text of an audit entry to `card`; replaying a card's
// audit log over its original form reproduces the current form.
void replay_audit_entry(ToolCard& card, const AuditEntry& entry, const TerminologyGraph& graph);

// The system of record for tool cards. Mutations are serialized through one
// writer lock; reads run concurrently against committed state.
class Registry {
 public:
  using ChangeListener = std::function<void(const ToolCard& card, std::uint64_t sequence)>;

  Registry(std::shared_ptr<const TerminologyGraph> graph, std::shared_ptr<DocumentStore> store,
           std::shared_ptr<MintingClient> minter, Clock clock = system_now);

  IngestReport ingest_records(std::istream& records, bool lenient = false);

  ToolCard submit_tool(std::string_view name, std::string_view description, std::string_view homepage_url,
                       std::string_view webmaster_email);

  ToolCard apply_edit(const Accession& accession, std::string_view field_path, const nlohmann::json& new_value,
                      const Editor& editor);

  CodeVersion add_version(const Accession& accession, std::string_view version_label,
                          std::string_view operating_system, std::string_view architecture,
                          std::optional<std::size_t> linked_publication, std::string_view payload);

  // Drafts are only visible with `as_editor`. Throws UnknownTool.
  ToolCard get_tool(const Accession& accession, bool as_editor = false) const;
  std::optional<ToolCard> find_tool(const Accession& accession) const;
  std::optional<Accession> find_by_name(std::string_view name) const;

  std::vector<ToolCard> cards() const;
  std::size_t size() const;
  std::vector<AuditEntry> audit_log(const Accession& accession) const;
  std::uint64_t sequence() const;

  // Appends a probe to the card's history and moves it between published
  // and obsolete as `classify` decides. Returns the new status on change.
  std::optional<CardStatus> record_probe(const Accession& accession, const LinkProbe& probe,
                                         const std::function<CardStatus(const std::vector<LinkProbe>&)>& classify);

  // Replaces one publication's CRediT badges for a user (merge is the caller's).
  Publication set_credit_badges(const Accession& accession, std::size_t publication_index, const UserId& user,
                                const std::set<CreditRole>& roles);

  void set_change_listener(ChangeListener listener);
  std::shared_ptr<const TerminologyGraph> terminology() const;
  const DocumentStore& store() const { return *store_; }

 private:
  ToolCard parse_record(const nlohmann::json& doc, bool lenient, std::vector<std::string>& warnings) const;
  void check_categories(const std::set<CategoryId>& ids, ErrorCode code) const;
  void check_unique_name(std::string_view name, const std::optional<Accession>& self) const;
  // Persists and publishes `card` while the writer lock is held.
  void commit(ToolCard card, std::vector<AuditEntry> audit);
  ToolCard& mutable_card(const Accession& accession);

  std::shared_ptr<const TerminologyGraph> graph_;
  std::shared_ptr<DocumentStore> store_;
  std::shared_ptr<MintingClient> minter_;
  Clock clock_;
  std::unique_ptr<AccessionAllocator> accessions_;

  std::mutex writer_;
  mutable std::shared_mutex state_mutex_;
  std::map<Accession, ToolCard> cards_;
  std::unordered_map<std::string, Accession> names_;
  std::map<Accession, std::vector<AuditEntry>> audit_;
  std::uint64_t sequence_ = 0;
  ChangeListener listener_;
};

}  // namespace toolseek
