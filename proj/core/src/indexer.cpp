#include "toolseek/indexer.hpp"

#include <algorithm>

#include "toolseek/error.hpp"
#include "toolseek/ranking.hpp"

namespace toolseek {

std::uint32_t PostingList::term_frequency(DocId doc) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), doc,
                             [](const Posting& p, DocId d) { return p.doc < d; });
  return it != entries.end() && it->doc == doc ? it->term_frequency : 0;
}

std::string_view to_string(FacetDimension d) {
  switch (d) {
    case FacetDimension::Category:
      return "category";
    case FacetDimension::OperatingSystem:
      return "operating_system";
    case FacetDimension::ProgrammingLanguage:
      return "programming_language";
    case FacetDimension::Interface:
      return "interface";
    case FacetDimension::Technology:
      return "technology";
  }
  return "?";
}

std::optional<FacetDimension> parse_facet_dimension(std::string_view text) {
  for (auto d : kAllFacetDimensions)
    if (to_string(d) == text) return d;
  return std::nullopt;
}

std::vector<std::string> indexed_tokens(const ToolCard& card) {
  std::vector<std::string> out;
  auto add = [&](std::string_view text) {
    auto toks = normalize_tokens(text);
    out.insert(out.end(), std::make_move_iterator(toks.begin()), std::make_move_iterator(toks.end()));
  };
  add(card.name);
  add(card.description);
  add(card.spec.software_type);
  add(card.spec.license);
  for (const auto& lang : card.spec.programming_languages) add(lang);
  return out;
}

FacetValues facet_values(const ToolCard& card, const TerminologyGraph& graph) {
  FacetValues f;
  for (const auto& c : card.category_ids) {
    if (!graph.has_category(c)) continue;
    f[FacetDimension::Category].insert(c);
    f[FacetDimension::Technology].insert(graph.branch_of(c));
  }
  for (const auto& os : card.spec.operating_systems) f[FacetDimension::OperatingSystem].insert(os);
  for (const auto& lang : card.spec.programming_languages) f[FacetDimension::ProgrammingLanguage].insert(lang);
  for (auto i : card.spec.interfaces) f[FacetDimension::Interface].insert(std::string(to_string(i)));
  return f;
}

namespace {

std::shared_ptr<const DocEntry> make_entry(const ToolCard& card, const TerminologyGraph& graph,
                                           const RatingSummary& ratings) {
  auto e = std::make_shared<DocEntry>();
  e->card = card;
  e->tokens = indexed_tokens(card);
  e->name_key = normalize_key(card.name);
  e->quality = quality_score(card);
  e->ratings = ratings;
  e->community = community_score(ratings);
  e->facets = facet_values(card, graph);
  return e;
}

std::map<std::string, std::uint32_t> term_counts(const std::vector<std::string>& tokens) {
  std::map<std::string, std::uint32_t> tf;
  for (const auto& t : tokens) ++tf[t];
  return tf;
}

void insert_sorted(std::vector<DocId>& ids, DocId id) {
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) ids.insert(it, id);
}

void erase_sorted(std::vector<DocId>& ids, DocId id) {
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it != ids.end() && *it == id) ids.erase(it);
}

}  // namespace

double IndexSnapshot::avg_doc_length() const {
  return docs_.empty() ? 0.0 : static_cast<double>(total_length_) / static_cast<double>(docs_.size());
}

std::optional<DocId> IndexSnapshot::find(const Accession& accession) const {
  auto it = by_accession_.find(accession);
  if (it == by_accession_.end()) return std::nullopt;
  return it->second;
}

std::optional<DocId> IndexSnapshot::find_by_name_key(const std::string& name_key) const {
  auto it = by_name_.find(name_key);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

const PostingList* IndexSnapshot::postings(const std::string& term) const {
  auto it = text_postings_.find(term);
  return it == text_postings_.end() ? nullptr : it->second.get();
}

const std::vector<DocId>* IndexSnapshot::category_postings(const CategoryId& category) const {
  auto it = category_postings_.find(category);
  return it == category_postings_.end() ? nullptr : &it->second;
}

const std::vector<DocId>* IndexSnapshot::facet_docs(FacetDimension dim, const std::string& value) const {
  auto it = facet_index_.find({dim, value});
  return it == facet_index_.end() ? nullptr : &it->second;
}

std::vector<std::string> IndexSnapshot::terms() const {
  std::vector<std::string> out;
  out.reserve(text_postings_.size());
  for (const auto& [t, p] : text_postings_) out.push_back(t);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<CategoryId> IndexSnapshot::posted_categories() const {
  std::vector<CategoryId> out;
  for (const auto& [c, ids] : category_postings_) out.push_back(c);
  return out;
}

void IndexSnapshot::add_doc(DocId id, std::shared_ptr<const DocEntry> entry) {
  for (const auto& [term, tf] : term_counts(entry->tokens)) {
    auto& slot = text_postings_[term];
    auto list = slot ? std::make_shared<PostingList>(*slot) : std::make_shared<PostingList>();
    auto& entries = list->entries;
    auto it = std::lower_bound(entries.begin(), entries.end(), id,
                               [](const Posting& p, DocId d) { return p.doc < d; });
    entries.insert(it, Posting{id, tf});
    slot = std::move(list);
  }
  for (const auto& c : entry->card.category_ids) insert_sorted(category_postings_[c], id);
  for (const auto& [dim, values] : entry->facets)
    for (const auto& v : values) insert_sorted(facet_index_[{dim, v}], id);
  total_length_ += entry->doc_length();
  by_accession_[entry->card.accession] = id;
  by_name_[entry->name_key] = id;
  if (id == docs_.size()) {
    docs_.push_back(std::move(entry));
  } else {
    docs_.at(id) = std::move(entry);
  }
}

void IndexSnapshot::remove_doc(DocId id) {
  const auto& entry = *docs_.at(id);
  for (const auto& [term, tf] : term_counts(entry.tokens)) {
    auto slot = text_postings_.find(term);
    if (slot == text_postings_.end()) continue;
    auto list = std::make_shared<PostingList>(*slot->second);
    auto& entries = list->entries;
    entries.erase(std::remove_if(entries.begin(), entries.end(), [&](const Posting& p) { return p.doc == id; }),
                  entries.end());
    if (entries.empty()) {
      text_postings_.erase(slot);
    } else {
      slot->second = std::move(list);
    }
  }
  for (const auto& c : entry.card.category_ids) {
    auto it = category_postings_.find(c);
    if (it == category_postings_.end()) continue;
    erase_sorted(it->second, id);
    if (it->second.empty()) category_postings_.erase(it);
  }
  for (const auto& [dim, values] : entry.facets) {
    for (const auto& v : values) {
      auto it = facet_index_.find({dim, v});
      if (it == facet_index_.end()) continue;
      erase_sorted(it->second, id);
      if (it->second.empty()) facet_index_.erase(it);
    }
  }
  total_length_ -= entry.doc_length();
  by_accession_.erase(entry.card.accession);
  if (auto it = by_name_.find(entry.name_key); it != by_name_.end() && it->second == id) by_name_.erase(it);
}

IndexSnapshot build_index(const std::vector<ToolCard>& cards, std::shared_ptr<const TerminologyGraph> graph,
                          const RatingLookup& ratings, std::uint64_t previous_generation, std::uint64_t sequence) {
  IndexSnapshot snap;
  snap.graph_ = graph ? std::move(graph) : std::make_shared<const TerminologyGraph>();
  snap.generation_ = previous_generation + 1;
  snap.sequence_ = sequence;

  // Term postings are gathered in plain vectors first; wrapping each append
  // in a copy-on-write list would be quadratic.
  std::unordered_map<std::string, std::vector<Posting>> postings;
  for (const auto& card : cards) {
    if (card.status == CardStatus::Draft) continue;
    const RatingSummary r = ratings ? ratings(card.accession) : RatingSummary{};
    auto entry = make_entry(card, *snap.graph_, r);
    const auto id = static_cast<DocId>(snap.docs_.size());
    for (const auto& [term, tf] : term_counts(entry->tokens)) postings[term].push_back({id, tf});
    for (const auto& c : entry->card.category_ids) snap.category_postings_[c].push_back(id);
    for (const auto& [dim, values] : entry->facets)
      for (const auto& v : values) snap.facet_index_[{dim, v}].push_back(id);
    snap.total_length_ += entry->doc_length();
    snap.by_accession_[entry->card.accession] = id;
    snap.by_name_[entry->name_key] = id;
    snap.docs_.push_back(std::move(entry));
  }
  snap.text_postings_.reserve(postings.size());
  for (auto& [term, list] : postings) {
    auto pl = std::make_shared<PostingList>();
    pl->entries = std::move(list);
    snap.text_postings_.emplace(term, std::move(pl));
  }
  return snap;
}

IndexSnapshot apply_update(const IndexSnapshot& snapshot, const ChangeEvent& event) {
  if (event.sequence <= snapshot.sequence_) {
    throw Error(ErrorCode::StaleEvent, "event " + std::to_string(event.sequence) + " is not newer than snapshot at " +
                                           std::to_string(snapshot.sequence_));
  }
  const auto existing = snapshot.find(event.card.accession);

  if (event.card.status == CardStatus::Draft) {
    if (!existing) {
      IndexSnapshot next = snapshot;
      ++next.generation_;
      next.sequence_ = event.sequence;
      return next;
    }
    // Leaving the index would punch a hole in the dense id range, so rebuild
    // from the stored entries instead.
    std::vector<ToolCard> cards;
    std::map<Accession, RatingSummary> kept;
    for (DocId id = 0; id < snapshot.docs_.size(); ++id) {
      if (id == *existing) continue;
      const auto& e = *snapshot.docs_[id];
      cards.push_back(e.card);
      kept.emplace(e.card.accession, e.ratings);
    }
    return build_index(
        cards, snapshot.graph_, [&](const Accession& a) { return kept.at(a); }, snapshot.generation_,
        event.sequence);
  }

  IndexSnapshot next = snapshot;
  ++next.generation_;
  next.sequence_ = event.sequence;
  auto entry = make_entry(event.card, *next.graph_, event.ratings);
  if (existing) {
    next.remove_doc(*existing);
    next.add_doc(*existing, std::move(entry));
  } else {
    next.add_doc(static_cast<DocId>(next.docs_.size()), std::move(entry));
  }
  return next;
}

}  // namespace toolseek
