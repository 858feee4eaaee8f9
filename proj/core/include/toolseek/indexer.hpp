#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "toolseek/model.hpp"
#include "toolseek/terminology.hpp"
#include "toolseek/text.hpp"

namespace toolseek {

using DocId = std::uint32_t;

struct Posting {
  DocId doc = 0;
  std::uint32_t term_frequency = 0;

  bool operator==(const Posting&) const = default;
};

struct PostingList {
  std::vector<Posting> entries;  // strictly increasing doc ids

  std::size_t document_frequency() const { return entries.size(); }
  std::uint32_t term_frequency(DocId doc) const;
};

enum class FacetDimension { Category, OperatingSystem, ProgrammingLanguage, Interface, Technology };

inline constexpr std::array<FacetDimension, 5> kAllFacetDimensions = {
    FacetDimension::Category, FacetDimension::OperatingSystem, FacetDimension::ProgrammingLanguage,
    FacetDimension::Interface, FacetDimension::Technology};

std::string_view to_string(FacetDimension d);
std::optional<FacetDimension> parse_facet_dimension(std::string_view text);

using FacetValues = std::map<FacetDimension, std::set<std::string>>;

struct DocEntry {
  ToolCard card;
  std::vector<std::string> tokens;  // indexed text in order, for phrase checks
  std::string name_key;
  double quality = 0;
  RatingSummary ratings;
  double community = 0;
  FacetValues facets;

  std::uint32_t doc_length() const { return static_cast<std::uint32_t>(tokens.size()); }
  bool obsolete() const { return card.status == CardStatus::Obsolete; }
};

// One committed change to a card or to its ratings.
struct ChangeEvent {
  std::uint64_t sequence = 0;
  ToolCard card;
  RatingSummary ratings;
};

using RatingLookup = std::function<RatingSummary(const Accession&)>;

// Name, description, software type, license and programming languages.
std::vector<std::string> indexed_tokens(const ToolCard& card);
FacetValues facet_values(const ToolCard& card, const TerminologyGraph& graph);

class IndexSnapshot {
 public:
  IndexSnapshot() = default;

  std::uint64_t generation() const { return generation_; }
  // Last change-event sequence folded in.
  std::uint64_t sequence() const { return sequence_; }
  std::size_t doc_count() const { return docs_.size(); }
  std::uint64_t total_length() const { return total_length_; }
  double avg_doc_length() const;

  const DocEntry& doc(DocId id) const { return *docs_.at(id); }
  std::optional<DocId> find(const Accession& accession) const;
  std::optional<DocId> find_by_name_key(const std::string& name_key) const;

  const PostingList* postings(const std::string& term) const;
  const std::vector<DocId>* category_postings(const CategoryId& category) const;
  const std::vector<DocId>* facet_docs(FacetDimension dim, const std::string& value) const;

  std::vector<std::string> terms() const;
  std::vector<CategoryId> posted_categories() const;
  const std::map<std::pair<FacetDimension, std::string>, std::vector<DocId>>& facet_index() const {
    return facet_index_;
  }

  const TerminologyGraph& graph() const { return *graph_; }
  std::shared_ptr<const TerminologyGraph> graph_ptr() const { return graph_; }

 private:
  friend IndexSnapshot build_index(const std::vector<ToolCard>&, std::shared_ptr<const TerminologyGraph>,
                                   const RatingLookup&, std::uint64_t, std::uint64_t);
  friend IndexSnapshot apply_update(const IndexSnapshot&, const ChangeEvent&);

  void add_doc(DocId id, std::shared_ptr<const DocEntry> entry);
  void remove_doc(DocId id);

  std::shared_ptr<const TerminologyGraph> graph_;
  std::uint64_t generation_ = 0;
  std::uint64_t sequence_ = 0;
  std::uint64_t total_length_ = 0;
  std::vector<std::shared_ptr<const DocEntry>> docs_;
  std::map<Accession, DocId> by_accession_;
  std::unordered_map<std::string, DocId> by_name_;
  // Shared with older snapshots until a list is touched.
  std::unordered_map<std::string, std::shared_ptr<const PostingList>> text_postings_;
  std::map<CategoryId, std::vector<DocId>> category_postings_;
  std::map<std::pair<FacetDimension, std::string>, std::vector<DocId>> facet_index_;
};

// Indexes published and obsolete cards in the given order; drafts are
// skipped. The snapshot gets generation previous_generation + 1.
IndexSnapshot build_index(const std::vector<ToolCard>& cards, std::shared_ptr<const TerminologyGraph> graph,
                          const RatingLookup& ratings = {}, std::uint64_t previous_generation = 0,
                          std::uint64_t sequence = 0);

// Folds one event into a copy of `snapshot`. The result answers every query
// exactly as build_index over the updated card set would. Throws
// Error(StaleEvent) when the event is not newer than the snapshot.
IndexSnapshot apply_update(const IndexSnapshot& snapshot, const ChangeEvent& event);

}  // namespace toolseek
