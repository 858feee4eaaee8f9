#include "toolseek/catalog.hpp"

namespace toolseek {

Catalog::Catalog(std::shared_ptr<const TerminologyGraph> graph, std::shared_ptr<DocumentStore> store,
                 std::shared_ptr<MintingClient> minter, Clock clock, RankWeights weights)
    : graph_(std::move(graph)), store_(std::move(store)), clock_(std::move(clock)), weights_(weights) {
  weights_.validate();
  if (!minter) minter = std::make_shared<MockMintingClient>();
  registry_ = std::make_unique<Registry>(graph_, store_, std::move(minter), clock_);
  community_ = std::make_unique<Community>(*registry_, store_, clock_);
  reindex();
  registry_->set_change_listener([this](const ToolCard& card, std::uint64_t) {
    publish(card);
    community_->note_tool_updated(card.accession);
  });
  community_->set_rating_listener([this](const Accession& accession) {
    if (auto card = registry_->find_tool(accession)) publish(*card);
  });
}

std::unique_ptr<Catalog> Catalog::open(const std::filesystem::path& store_dir,
                                       const std::filesystem::path& terminology_file,
                                       std::shared_ptr<MintingClient> minter, RankWeights weights) {
  auto graph = std::make_shared<const TerminologyGraph>(load_terminology_file(terminology_file.string()));
  auto store = std::make_shared<FileStore>(store_dir);
  return std::make_unique<Catalog>(std::move(graph), std::move(store), std::move(minter), system_now, weights);
}

std::shared_ptr<const IndexSnapshot> Catalog::snapshot() const {
  std::lock_guard lock(index_mutex_);
  return snapshot_;
}

std::uint64_t Catalog::reindex() {
  // Cards are read under the index lock so a concurrent publish cannot land
  // between the read and the swap and then be overwritten.
  std::lock_guard lock(index_mutex_);
  const auto cards = registry_->cards();
  const auto previous = snapshot_ ? snapshot_->generation() : 0;
  snapshot_ = std::make_shared<const IndexSnapshot>(build_index(
      cards, graph_, [this](const Accession& a) { return community_->rating_summary(a); }, previous,
      event_sequence_));
  return snapshot_->generation();
}

void Catalog::publish(const ToolCard& card) {
  const auto ratings = community_->rating_summary(card.accession);
  std::lock_guard lock(index_mutex_);
  snapshot_ = std::make_shared<const IndexSnapshot>(apply_update(*snapshot_, {++event_sequence_, card, ratings}));
}

ParseContext Catalog::parse_context(const IndexSnapshot& snapshot) const {
  ParseContext ctx;
  ctx.graph = graph_.get();
  ctx.is_tool_name = [&snapshot](const std::string& key) { return snapshot.find_by_name_key(key).has_value(); };
  return ctx;
}

QueryPlan Catalog::plan(const SearchRequest& request, const IndexSnapshot& snapshot) const {
  const auto parsed = parse_query(request.q, parse_context(snapshot));
  return compile_plan(parsed, request.filters, *graph_, request.include_obsolete);
}

SearchResponse Catalog::search(const SearchRequest& request) const {
  const auto snap = snapshot();
  return execute_search(plan(request, *snap), *snap, weights_, request.page, request.per_page);
}

std::vector<RelatedTool> Catalog::related(const Accession& accession, std::size_t k) const {
  return related_tools(accession, k, *snapshot());
}

}  // namespace toolseek
