#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "toolseek/indexer.hpp"
#include "toolseek/query.hpp"
#include "toolseek/ranking.hpp"

namespace toolseek {

inline constexpr std::size_t kMaxPerPage = 100;

using FacetCounts = std::map<FacetDimension, std::map<std::string, std::size_t>>;

struct SearchHit {
  ScoredResult scored;
  std::string name;
  std::string summary;
  std::vector<CategoryId> categories;
  CardStatus status = CardStatus::Published;
};

struct SearchResponse {
  std::size_t total_hits = 0;
  std::size_t page = 1;
  std::size_t per_page = 20;
  std::vector<SearchHit> results;
  FacetCounts facets;
  std::uint64_t generation = 0;
  std::chrono::microseconds elapsed{0};
};

struct RelatedTool {
  Accession accession;
  std::string name;
  std::string summary;
  std::size_t shared_categories = 0;
  double quality = 0;
};

// Description cut to at most 200 bytes on a character boundary.
std::string summarize(const std::string& description);

// The filtered hit set in doc id order, before ranking.
std::vector<DocId> match_documents(const QueryPlan& plan, const IndexSnapshot& snapshot);
// Signals for one doc under a plan.
Signals compute_signals(const QueryPlan& plan, const IndexSnapshot& snapshot, DocId doc);
std::vector<ScoredResult> rank_documents(const QueryPlan& plan, const IndexSnapshot& snapshot,
                                         const RankWeights& weights, const std::vector<DocId>& docs);
FacetCounts compute_facets(const std::vector<DocId>& docs, const IndexSnapshot& snapshot);

// Throws Error(EmptyPlan), Error(PageOutOfRange), Error(InvalidWeights).
SearchResponse execute_search(const QueryPlan& plan, const IndexSnapshot& snapshot, const RankWeights& weights,
                              std::size_t page = 1, std::size_t per_page = 20);

// Throws Error(UnknownTool) when the accession is not indexed.
std::vector<RelatedTool> related_tools(const Accession& accession, std::size_t k, const IndexSnapshot& snapshot);

nlohmann::json hit_to_json(const SearchHit& hit);
nlohmann::json facets_to_json(const FacetCounts& facets);
// Wire body of a search; elapsed time travels separately.
nlohmann::json response_to_json(const SearchResponse& response);
nlohmann::json related_to_json(const std::vector<RelatedTool>& tools);

}  // namespace toolseek
