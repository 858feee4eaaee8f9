#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace toolseek {

using ConceptId = std::string;
using CategoryId = std::string;

// Category trees are at most three levels deep (technology > analysis > step).
inline constexpr int kMaxCategoryLevel = 3;
// Longest term, in tokens, the span matcher will consider.
inline constexpr std::size_t kMaxTermTokens = 6;

enum class TermKind { Preferred, Synonym, Abbreviation, CommonExpression };

enum class OmicsField {
  Genomics,
  Epigenomics,
  Transcriptomics,
  Proteomics,
  Phenomics,
  Metabolomics,
  Metagenomics,
  MultiOmics,
  Other,
};

std::string_view to_string(TermKind kind);
std::string_view to_string(OmicsField field);
std::optional<TermKind> parse_term_kind(std::string_view text);
std::optional<OmicsField> parse_omics_field(std::string_view text);

struct Term {
  std::string surface;
  TermKind kind = TermKind::Synonym;

  bool operator==(const Term&) const = default;
};

struct Concept {
  ConceptId concept_id;
  std::string preferred_label;
  std::vector<Term> terms;
  std::set<CategoryId> linked_category_ids;
  std::set<ConceptId> related_concept_ids;

  bool operator==(const Concept&) const = default;
};

struct CategoryNode {
  CategoryId category_id;
  std::string label;
  int level = 1;
  std::optional<CategoryId> parent_id;
  OmicsField omics_field = OmicsField::Other;

  bool operator==(const CategoryNode&) const = default;
};

// Unvalidated terminology content, as read from a document.
struct TerminologyData {
  std::vector<CategoryNode> categories;
  std::vector<Concept> concepts;

  bool operator==(const TerminologyData&) const = default;
};

struct Violation {
  std::string id;
  std::string rule;
  std::string detail;
};

// What a normalized surface resolves to: explicit concepts plus categories
// whose label is that surface.
struct LexiconEntry {
  std::set<ConceptId> concepts;
  std::set<CategoryId> categories;
};

// A recognized term in a token sequence. [begin, end) indexes the tokens.
// Surfaces shared by several concepts resolve to all of them.
struct ConceptMatch {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::vector<ConceptId> concept_ids;
  std::vector<CategoryId> category_ids;
  std::string matched_surface;

  bool operator==(const ConceptMatch&) const = default;
};

// Every invariant violation in `data`; empty iff the data forms a valid graph.
std::vector<Violation> validate_graph(const TerminologyData& data);

class TerminologyGraph {
 public:
  TerminologyGraph() = default;

  // Throws Error(InvariantViolation) naming the first offending id.
  static TerminologyGraph build(TerminologyData data);

  const std::map<ConceptId, Concept>& concepts() const { return concepts_; }
  const std::map<CategoryId, CategoryNode>& categories() const { return categories_; }

  const Concept* find_concept(std::string_view id) const;
  const CategoryNode* find_category(std::string_view id) const;
  bool has_category(std::string_view id) const { return find_category(id) != nullptr; }

  const std::vector<CategoryId>& children(std::string_view id) const;
  // Reflexive-transitive closure of the child relation. Throws UnknownCategory.
  std::set<CategoryId> descendants(std::string_view id) const;
  // The level-1 ancestor (technology branch) of a category.
  const CategoryId& branch_of(std::string_view id) const;

  // Lookup by normalized key (tokens joined by single spaces).
  const LexiconEntry* lookup(const std::string& key) const;
  // Normalized surface -> concepts carrying it; the inverse of the term sets.
  std::map<std::string, std::set<ConceptId>> term_lexicon() const;

  TerminologyData data() const;

  bool operator==(const TerminologyGraph& other) const { return data() == other.data(); }

 private:
  std::map<ConceptId, Concept> concepts_;
  std::map<CategoryId, CategoryNode> categories_;
  std::map<CategoryId, std::vector<CategoryId>, std::less<>> children_;
  std::map<CategoryId, CategoryId, std::less<>> branch_;
  std::unordered_map<std::string, LexiconEntry> lexicon_;
};

// Parses a terminology document; rejects the whole document on any error.
// Throws Error(MalformedDocument) or Error(InvariantViolation).
TerminologyData parse_terminology(std::istream& in);
TerminologyGraph load_terminology(std::istream& in);
TerminologyGraph load_terminology_file(const std::string& path);
std::string serialize_terminology(const TerminologyGraph& graph);

// Greedy leftmost-longest matching of token n-grams (up to kMaxTermTokens)
// against the lexicon. Returned spans are sorted and non-overlapping.
std::vector<ConceptMatch> resolve_spans(std::string_view text, const TerminologyGraph& graph);
std::vector<ConceptMatch> resolve_token_spans(const std::vector<std::string>& tokens,
                                              const TerminologyGraph& graph);

inline std::set<CategoryId> descendants(std::string_view category_id,
                                        const TerminologyGraph& graph) {
  return graph.descendants(category_id);
}

}  // namespace toolseek
