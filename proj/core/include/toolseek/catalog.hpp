#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>

#include "toolseek/community.hpp"
#include "toolseek/identifiers.hpp"
#include "toolseek/indexer.hpp"
#include "toolseek/query.hpp"
#include "toolseek/ranking.hpp"
#include "toolseek/registry.hpp"
#include "toolseek/search.hpp"
#include "toolseek/store.hpp"

namespace toolseek {

struct SearchRequest {
  std::string q;
  FilterSet filters;
  bool include_obsolete = false;
  std::size_t page = 1;
  std::size_t per_page = 20;
};

// Wires the registry and community to the search index. Every committed
// change is folded into a new snapshot before the mutating call returns, so
// a mutation's generation is visible to the next search.
class Catalog {
 public:
  Catalog(std::shared_ptr<const TerminologyGraph> graph, std::shared_ptr<DocumentStore> store,
          std::shared_ptr<MintingClient> minter, Clock clock = system_now, RankWeights weights = {});

  // File-backed catalog: terminology JSON plus a FileStore directory.
  static std::unique_ptr<Catalog> open(const std::filesystem::path& store_dir,
                                       const std::filesystem::path& terminology_file,
                                       std::shared_ptr<MintingClient> minter = nullptr, RankWeights weights = {});

  Catalog(const Catalog&) = delete;
  Catalog& operator=(const Catalog&) = delete;

  Registry& registry() { return *registry_; }
  const Registry& registry() const { return *registry_; }
  Community& community() { return *community_; }
  const Community& community() const { return *community_; }
  const TerminologyGraph& terminology() const { return *graph_; }
  std::shared_ptr<DocumentStore> store() const { return store_; }
  const RankWeights& weights() const { return weights_; }
  Clock clock() const { return clock_; }

  std::shared_ptr<const IndexSnapshot> snapshot() const;
  std::uint64_t generation() const { return snapshot()->generation(); }
  // Full rebuild; returns the new generation.
  std::uint64_t reindex();

  ParseContext parse_context(const IndexSnapshot& snapshot) const;
  QueryPlan plan(const SearchRequest& request, const IndexSnapshot& snapshot) const;
  SearchResponse search(const SearchRequest& request) const;
  std::vector<RelatedTool> related(const Accession& accession, std::size_t k) const;

 private:
  void publish(const ToolCard& card);

  std::shared_ptr<const TerminologyGraph> graph_;
  std::shared_ptr<DocumentStore> store_;
  Clock clock_;
  RankWeights weights_;
  std::unique_ptr<Registry> registry_;
  std::unique_ptr<Community> community_;

  mutable std::mutex index_mutex_;
  std::shared_ptr<const IndexSnapshot> snapshot_;
  std::uint64_t event_sequence_ = 0;
};

}  // namespace toolseek
