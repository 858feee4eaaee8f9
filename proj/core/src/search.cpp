#include "toolseek/search.hpp"

#include <algorithm>
#include <iterator>

#include "toolseek/error.hpp"

namespace toolseek {

namespace {

using DocSet = std::vector<DocId>;  // sorted, unique

DocSet unite(const DocSet& a, const DocSet& b) {
  DocSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

DocSet intersect(const DocSet& a, const DocSet& b) {
  DocSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

DocSet subtract(const DocSet& a, const DocSet& b) {
  DocSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

DocSet term_docs(const IndexSnapshot& snap, const std::string& term) {
  DocSet out;
  if (const auto* pl = snap.postings(term)) {
    out.reserve(pl->entries.size());
    for (const auto& p : pl->entries) out.push_back(p.doc);
  }
  return out;
}

DocSet category_docs(const IndexSnapshot& snap, const std::set<CategoryId>& cats) {
  DocSet out;
  for (const auto& c : cats)
    if (const auto* ids = snap.category_postings(c)) out = unite(out, *ids);
  return out;
}

bool contains_sequence(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

DocSet phrase_docs(const IndexSnapshot& snap, const std::vector<std::string>& tokens) {
  DocSet docs = term_docs(snap, tokens.front());
  for (std::size_t i = 1; i < tokens.size() && !docs.empty(); ++i) docs = intersect(docs, term_docs(snap, tokens[i]));
  DocSet out;
  for (DocId d : docs)
    if (contains_sequence(snap.doc(d).tokens, tokens)) out.push_back(d);
  return out;
}

DocSet leaf_docs(const QueryPlan& plan, const IndexSnapshot& snap, const QueryNode& leaf) {
  DocSet text;
  if (leaf.kind == QueryNode::Kind::Term) text = term_docs(snap, leaf.tokens.front());
  if (leaf.kind == QueryNode::Kind::Phrase) text = phrase_docs(snap, leaf.tokens);
  auto it = plan.leaf_categories.find(leaf_key(leaf));
  if (it == plan.leaf_categories.end()) return text;
  return unite(text, category_docs(snap, it->second));
}

void positive_leaves(const QueryNode& node, bool negated, std::vector<const QueryNode*>& out) {
  if (node.is_leaf()) {
    if (!negated) out.push_back(&node);
    return;
  }
  for (const auto& c : node.children) positive_leaves(c, negated || node.kind == QueryNode::Kind::Not, out);
}

DocSet evaluate(const QueryNode& node, const QueryPlan& plan, const IndexSnapshot& snap, const DocSet& universe) {
  using K = QueryNode::Kind;
  switch (node.kind) {
    case K::And: {
      DocSet acc = evaluate(node.children.front(), plan, snap, universe);
      for (std::size_t i = 1; i < node.children.size(); ++i) acc = intersect(acc, evaluate(node.children[i], plan, snap, universe));
      return acc;
    }
    case K::Or: {
      DocSet acc;
      for (const auto& c : node.children) acc = unite(acc, evaluate(c, plan, snap, universe));
      return acc;
    }
    case K::Not:
      return subtract(universe, evaluate(node.children.front(), plan, snap, universe));
    default:
      return leaf_docs(plan, snap, node);
  }
}

DocSet all_docs(const IndexSnapshot& snap) {
  DocSet out(snap.doc_count());
  for (DocId i = 0; i < out.size(); ++i) out[i] = i;
  return out;
}

DocSet candidates(const QueryPlan& plan, const IndexSnapshot& snap) {
  switch (plan.mode) {
    case QueryMode::Category:
      return category_docs(snap, plan.expanded_categories);
    case QueryMode::Acronym: {
      if (auto id = snap.find_by_name_key(plan.ast.text)) return {*id};
      return {};
    }
    case QueryMode::Boolean: {
      std::vector<const QueryNode*> leaves;
      positive_leaves(plan.ast, false, leaves);
      DocSet universe;
      for (const auto* leaf : leaves) universe = unite(universe, leaf_docs(plan, snap, *leaf));
      return intersect(universe, evaluate(plan.ast, plan, snap, universe));
    }
    case QueryMode::Natural: {
      if (plan.browse()) return all_docs(snap);
      DocSet out = category_docs(snap, plan.expanded_categories);
      for (const auto& t : plan.residual_terms) out = unite(out, term_docs(snap, t));
      return out;
    }
  }
  return {};
}

bool passes(const FilterClause& clause, const DocEntry& doc, const TerminologyGraph& graph) {
  if (clause.dimension == FacetDimension::Category) {
    for (const auto& c : doc.card.category_ids) {
      for (const auto* node = graph.find_category(c); node;
           node = node->parent_id ? graph.find_category(*node->parent_id) : nullptr) {
        if (clause.values.count(node->category_id)) return true;
      }
    }
    return false;
  }
  auto it = doc.facets.find(clause.dimension);
  if (it == doc.facets.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(), [&](const std::string& v) { return clause.values.count(v) > 0; });
}

bool admitted(const QueryPlan& plan, const IndexSnapshot& snap, DocId id) {
  const auto& doc = snap.doc(id);
  if (doc.obsolete() && !plan.include_obsolete) return false;
  return std::all_of(plan.filters.clauses.begin(), plan.filters.clauses.end(),
                     [&](const FilterClause& c) { return passes(c, doc, snap.graph()); });
}

SearchHit make_hit(ScoredResult scored, const DocEntry& doc) {
  SearchHit hit;
  hit.scored = std::move(scored);
  hit.name = doc.card.name;
  hit.summary = summarize(doc.card.description);
  hit.categories.assign(doc.card.category_ids.begin(), doc.card.category_ids.end());
  hit.status = doc.card.status;
  return hit;
}

}  // namespace

std::string summarize(const std::string& description) {
  constexpr std::size_t kLimit = 200;
  if (description.size() <= kLimit) return description;
  std::size_t cut = kLimit;
  while (cut > 0 && (static_cast<unsigned char>(description[cut]) & 0xC0) == 0x80) --cut;
  return description.substr(0, cut) + "...";
}

std::vector<DocId> match_documents(const QueryPlan& plan, const IndexSnapshot& snapshot) {
  DocSet out;
  for (DocId id : candidates(plan, snapshot))
    if (admitted(plan, snapshot, id)) out.push_back(id);
  return out;
}

Signals compute_signals(const QueryPlan& plan, const IndexSnapshot& snap, DocId id) {
  const auto& doc = snap.doc(id);
  Signals s;
  std::vector<TermStat> stats;
  stats.reserve(plan.text_terms.size());
  for (const auto& t : plan.text_terms) {
    const auto* pl = snap.postings(t);
    stats.push_back({pl ? pl->document_frequency() : 0, pl ? pl->term_frequency(id) : 0});
  }
  s.text_relevance = text_relevance(stats, doc.doc_length(), snap.doc_count(), snap.avg_doc_length());
  s.category_match = std::any_of(doc.card.category_ids.begin(), doc.card.category_ids.end(),
                                 [&](const CategoryId& c) { return plan.expanded_categories.count(c) > 0; })
                         ? 1.0
                         : 0.0;
  s.quality = doc.quality;
  s.community = doc.community;
  return s;
}

std::vector<ScoredResult> rank_documents(const QueryPlan& plan, const IndexSnapshot& snapshot,
                                         const RankWeights& weights, const std::vector<DocId>& docs) {
  weights.validate();
  const ActiveSignals active{!plan.text_terms.empty(), !plan.expanded_categories.empty()};
  std::vector<ScoredResult> out;
  out.reserve(docs.size());
  for (DocId id : docs) {
    out.push_back(combine_score(snapshot.doc(id).card.accession, compute_signals(plan, snapshot, id), weights, active));
  }
  std::sort(out.begin(), out.end(), ranks_before);
  return out;
}

FacetCounts compute_facets(const std::vector<DocId>& docs, const IndexSnapshot& snapshot) {
  FacetCounts out;
  for (DocId id : docs)
    for (const auto& [dim, values] : snapshot.doc(id).facets)
      for (const auto& v : values) ++out[dim][v];
  return out;
}

SearchResponse execute_search(const QueryPlan& plan, const IndexSnapshot& snapshot, const RankWeights& weights,
                              std::size_t page, std::size_t per_page) {
  const auto start = std::chrono::steady_clock::now();
  if (plan.browse() && plan.filters.empty()) {
    throw Error(ErrorCode::EmptyPlan, "query has no terms, categories or filters", "q");
  }
  if (per_page < 1 || per_page > kMaxPerPage) {
    throw Error(ErrorCode::PageOutOfRange, "per_page must be between 1 and " + std::to_string(kMaxPerPage), "per_page");
  }
  const auto docs = match_documents(plan, snapshot);
  if (page < 1 || (page - 1) * per_page >= std::max<std::size_t>(docs.size(), 1)) {
    throw Error(ErrorCode::PageOutOfRange, "page " + std::to_string(page) + " is out of range", "page");
  }
  auto ranked = rank_documents(plan, snapshot, weights, docs);

  SearchResponse r;
  r.total_hits = docs.size();
  r.page = page;
  r.per_page = per_page;
  r.generation = snapshot.generation();
  r.facets = compute_facets(docs, snapshot);
  const auto first = (page - 1) * per_page;
  const auto last = std::min(ranked.size(), first + per_page);
  for (auto i = first; i < last; ++i) {
    const auto id = *snapshot.find(ranked[i].accession);
    r.results.push_back(make_hit(std::move(ranked[i]), snapshot.doc(id)));
  }
  r.elapsed = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start);
  return r;
}

std::vector<RelatedTool> related_tools(const Accession& accession, std::size_t k, const IndexSnapshot& snapshot) {
  const auto self = snapshot.find(accession);
  if (!self) throw Error(ErrorCode::UnknownTool, "unknown tool " + accession.str(), accession.str());
  const auto& own = snapshot.doc(*self).card.category_ids;
  std::map<DocId, std::size_t> shared;
  for (const auto& c : own)
    if (const auto* ids = snapshot.category_postings(c))
      for (DocId id : *ids)
        if (id != *self) ++shared[id];

  std::vector<RelatedTool> out;
  for (const auto& [id, n] : shared) {
    const auto& doc = snapshot.doc(id);
    if (doc.card.status != CardStatus::Published) continue;
    out.push_back({doc.card.accession, doc.card.name, summarize(doc.card.description), n, doc.quality});
  }
  std::sort(out.begin(), out.end(), [](const RelatedTool& a, const RelatedTool& b) {
    if (a.shared_categories != b.shared_categories) return a.shared_categories > b.shared_categories;
    if (a.quality != b.quality) return a.quality > b.quality;
    return a.accession < b.accession;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

nlohmann::json hit_to_json(const SearchHit& hit) {
  const auto& s = hit.scored.signals;
  nlohmann::json explanation = nlohmann::json::array();
  for (const auto& c : hit.scored.explanation) {
    explanation.push_back({{"signal", c.signal}, {"weight", c.weight}, {"value", c.value}, {"contribution", c.contribution}});
  }
  return {{"accession", hit.scored.accession.str()},
          {"name", hit.name},
          {"summary", hit.summary},
          {"score", hit.scored.final_score},
          {"signals",
           {{"text_relevance", s.text_relevance}, {"category_match", s.category_match}, {"quality", s.quality},
            {"community", s.community}}},
          {"explanation", explanation},
          {"categories", hit.categories},
          {"status", std::string(to_string(hit.status))}};
}

nlohmann::json facets_to_json(const FacetCounts& facets) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [dim, counts] : facets) out[std::string(to_string(dim))] = counts;
  return out;
}

nlohmann::json response_to_json(const SearchResponse& r) {
  nlohmann::json results = nlohmann::json::array();
  for (const auto& h : r.results) results.push_back(hit_to_json(h));
  return {{"total_hits", r.total_hits}, {"page", r.page},     {"per_page", r.per_page},
          {"generation", r.generation}, {"results", results}, {"facets", facets_to_json(r.facets)}};
}

nlohmann::json related_to_json(const std::vector<RelatedTool>& tools) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : tools) {
    out.push_back({{"accession", t.accession.str()}, {"name", t.name}, {"summary", t.summary},
                   {"shared_categories", t.shared_categories}, {"quality", t.quality}});
  }
  return out;
}

}  // namespace toolseek
