#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "toolseek/indexer.hpp"
#include "toolseek/search.hpp"

namespace toolseek::testing {

ParseContext parse_context(const IndexSnapshot& snapshot);

// Parses, plans and pages through the full result list of `query`.
struct EngineResult {
  ParsedQuery parsed;
  std::vector<ScoredResult> ranked;
  FacetCounts facets;
  std::size_t total = 0;
};
EngineResult run_engine(const GenQuery& query, const IndexSnapshot& snapshot, const RankWeights& weights = {},
                        std::size_t per_page = kMaxPerPage);

IndexSnapshot index_corpus(const Corpus& corpus);

// Empty when the engine agrees with the oracle: same hit set, scores within
// 1e-9, and an order that is non-increasing in score with the documented
// tie-break among equal scores. Otherwise a description of the mismatch.
std::optional<std::string> compare_with_oracle(const EngineResult& engine, const std::vector<Oracle::Hit>& oracle);

}  // namespace toolseek::testing
