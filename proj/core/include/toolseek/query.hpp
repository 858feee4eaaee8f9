#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "toolseek/indexer.hpp"
#include "toolseek/terminology.hpp"

namespace toolseek {

inline constexpr std::size_t kMaxQueryLength = 1024;  // code points
inline constexpr std::size_t kMaxQueryDepth = 32;

enum class QueryMode { Natural, Boolean, Category, Acronym };

std::string_view to_string(QueryMode mode);

struct QueryNode {
  enum class Kind { Term, Phrase, And, Or, Not, Category, Acronym };

  Kind kind = Kind::Term;
  // Term: one normalized token. Phrase: two or more. Acronym: the
  // normalized tool name. Category: the id in `text`.
  std::vector<std::string> tokens;
  std::string text;
  std::vector<QueryNode> children;

  static QueryNode term(std::string token);
  static QueryNode phrase(std::vector<std::string> tokens);
  static QueryNode category(std::string id);
  static QueryNode acronym(std::string name_key);
  static QueryNode branch(Kind kind, std::vector<QueryNode> children);

  bool is_leaf() const { return children.empty() && kind != Kind::And && kind != Kind::Or && kind != Kind::Not; }
  std::size_t depth() const;
  bool operator==(const QueryNode&) const = default;
};

struct ParsedQuery {
  QueryMode mode = QueryMode::Natural;
  QueryNode ast;

  bool operator==(const ParsedQuery&) const = default;
};

// What the classifier may consult besides the query text.
struct ParseContext {
  const TerminologyGraph* graph = nullptr;
  std::function<bool(const std::string& name_key)> is_tool_name;
};

// Total: every string maps to exactly one mode. Never throws.
QueryMode classify_query(std::string_view query, const ParseContext& ctx = {});

// Throws Error(QueryTooLong), Error(SyntaxError) with a 0-based code point
// position, Error(PureNegation) or Error(DepthExceeded).
ParsedQuery parse_query(std::string_view query, const ParseContext& ctx = {});
// Boolean grammar regardless of classification.
QueryNode parse_boolean(std::string_view query);

// Text that parses back to an identical query under the same mode.
std::string serialize_query(const ParsedQuery& query);
std::string serialize_ast(const QueryNode& node);

struct FilterClause {
  FacetDimension dimension = FacetDimension::Category;
  std::set<std::string> values;  // any one suffices

  bool operator==(const FilterClause&) const = default;
};

// Clauses are conjunctive. A category clause also admits descendants.
struct FilterSet {
  std::vector<FilterClause> clauses;

  bool empty() const { return clauses.empty(); }
  FilterSet& add(FacetDimension dimension, std::set<std::string> values);
  bool operator==(const FilterSet&) const = default;
};

// Throws Error(BadFacetValue) for empty values, unknown interfaces or
// non-branch technologies, Error(UnknownCategory) for unknown categories.
void validate_filters(const FilterSet& filters, const TerminologyGraph& graph);

struct QueryPlan {
  QueryMode mode = QueryMode::Natural;
  QueryNode ast;
  std::vector<ConceptMatch> concept_matches;
  std::set<CategoryId> expanded_categories;
  std::vector<std::string> residual_terms;
  // Distinct terms scored by BM25: residual terms plus matched concept
  // surfaces (natural), positive leaf tokens (boolean), the name (acronym).
  std::vector<std::string> text_terms;
  // Boolean mode: expanded categories per leaf, keyed by leaf_key().
  std::map<std::string, std::set<CategoryId>> leaf_categories;
  FilterSet filters;
  bool include_obsolete = false;

  bool browse() const;  // filters only: every doc is a candidate
};

std::string leaf_key(const QueryNode& leaf);

// Throws Error(UnknownCategory), Error(EmptyPlan), Error(BadFacetValue).
QueryPlan compile_plan(const ParsedQuery& query, const FilterSet& filters, const TerminologyGraph& graph,
                       bool include_obsolete = false);

}  // namespace toolseek
