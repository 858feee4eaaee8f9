#include "toolseek/terminology.hpp"

#include <deque>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "toolseek/error.hpp"
#include "toolseek/text.hpp"

namespace toolseek {

using nlohmann::json;

namespace {

constexpr std::pair<TermKind, std::string_view> kTermKinds[] = {
    {TermKind::Preferred, "preferred"},
    {TermKind::Synonym, "synonym"},
    {TermKind::Abbreviation, "abbreviation"},
    {TermKind::CommonExpression, "common-expression"},
};

constexpr std::pair<OmicsField, std::string_view> kOmicsFields[] = {
    {OmicsField::Genomics, "genomics"},         {OmicsField::Epigenomics, "epigenomics"},
    {OmicsField::Transcriptomics, "transcriptomics"}, {OmicsField::Proteomics, "proteomics"},
    {OmicsField::Phenomics, "phenomics"},       {OmicsField::Metabolomics, "metabolomics"},
    {OmicsField::Metagenomics, "metagenomics"}, {OmicsField::MultiOmics, "multi-omics"},
    {OmicsField::Other, "other"},
};

const std::vector<CategoryId> kNoChildren;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::MalformedDocument, "malformed terminology document: " + what);
}

void check_keys(const json& object, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    bool known = false;
    for (auto name : allowed) known = known || key == name;
    if (!known) malformed("unknown field '" + key + "' in " + where);
  }
}

std::string required_string(const json& object, const char* key, const std::string& where) {
  auto it = object.find(key);
  if (it == object.end() || !it->is_string()) malformed("missing string '" + std::string(key) + "' in " + where);
  return it->get<std::string>();
}

template <typename Set>
Set string_set(const json& object, const char* key, const std::string& where) {
  Set out;
  auto it = object.find(key);
  if (it == object.end() || it->is_null()) return out;
  if (!it->is_array()) malformed("'" + std::string(key) + "' must be an array in " + where);
  for (const auto& v : *it) {
    if (!v.is_string()) malformed("non-string entry in '" + std::string(key) + "' in " + where);
    out.insert(out.end(), v.get<std::string>());
  }
  return out;
}

}  // namespace

std::string_view to_string(TermKind kind) {
  for (const auto& [k, name] : kTermKinds)
    if (k == kind) return name;
  return "synonym";
}

std::string_view to_string(OmicsField field) {
  for (const auto& [f, name] : kOmicsFields)
    if (f == field) return name;
  return "other";
}

std::optional<TermKind> parse_term_kind(std::string_view text) {
  for (const auto& [k, name] : kTermKinds)
    if (name == text) return k;
  return std::nullopt;
}

std::optional<OmicsField> parse_omics_field(std::string_view text) {
  for (const auto& [f, name] : kOmicsFields)
    if (name == text) return f;
  return std::nullopt;
}

std::vector<Violation> validate_graph(const TerminologyData& data) {
  std::vector<Violation> report;
  auto violate = [&](const std::string& id, std::string rule, std::string detail) {
    report.push_back({id, std::move(rule), std::move(detail)});
  };

  std::map<std::string_view, const CategoryNode*> by_id;
  for (const auto& node : data.categories) {
    if (node.category_id.empty()) {
      violate(node.category_id, "empty-id", "category id is empty");
      continue;
    }
    if (!by_id.emplace(node.category_id, &node).second) {
      violate(node.category_id, "duplicate-id", "category id declared more than once");
    }
  }

  for (const auto& [id, node] : by_id) {
    const std::string sid(id);
    if (node->label.empty()) violate(sid, "empty-label", "category label is empty");

    // Walk the parent chain to derive the level and detect cycles.
    int depth = 1;
    bool broken = false;
    std::unordered_set<std::string_view> seen{id};
    const CategoryNode* cur = node;
    while (cur->parent_id) {
      auto parent = by_id.find(*cur->parent_id);
      if (parent == by_id.end()) {
        if (cur == node) violate(sid, "dangling-parent", "parent '" + *cur->parent_id + "' does not exist");
        broken = true;
        break;
      }
      if (!seen.insert(parent->first).second) {
        violate(sid, "cycle", "category is part of a parent cycle");
        broken = true;
        break;
      }
      cur = parent->second;
      ++depth;
    }
    if (broken) continue;
    if (depth > kMaxCategoryLevel) {
      violate(sid, "depth-exceeded",
              "category sits at level " + std::to_string(depth) + ", deeper than " +
                  std::to_string(kMaxCategoryLevel));
    } else if (node->level != depth) {
      violate(sid, "level-mismatch",
              "declared level " + std::to_string(node->level) + " but tree position gives " +
                  std::to_string(depth));
    }
  }

  std::set<std::string_view> concept_ids;
  for (const auto& c : data.concepts) {
    if (!concept_ids.insert(c.concept_id).second) {
      violate(c.concept_id, "duplicate-id", "concept id declared more than once");
    }
  }
  for (const auto& c : data.concepts) {
    if (c.concept_id.empty()) violate(c.concept_id, "empty-id", "concept id is empty");
    if (c.terms.empty()) {
      violate(c.concept_id, "empty-terms", "concept has no terms");
    } else {
      bool has_preferred = false;
      for (const auto& t : c.terms) {
        has_preferred = has_preferred || t.surface == c.preferred_label;
        if (normalize_tokens(t.surface).empty()) {
          violate(c.concept_id, "empty-term", "term '" + t.surface + "' is empty after normalization");
        }
      }
      if (!has_preferred) {
        violate(c.concept_id, "preferred-label-missing",
                "preferred label '" + c.preferred_label + "' is not among the terms");
      }
    }
    for (const auto& cat : c.linked_category_ids) {
      if (!by_id.count(cat)) violate(c.concept_id, "dangling-category", "linked category '" + cat + "' does not exist");
    }
    for (const auto& rel : c.related_concept_ids) {
      if (!concept_ids.count(rel)) violate(c.concept_id, "dangling-related", "related concept '" + rel + "' does not exist");
    }
  }
  return report;
}

TerminologyGraph TerminologyGraph::build(TerminologyData data) {
  auto report = validate_graph(data);
  if (!report.empty()) {
    const auto& v = report.front();
    throw Error(ErrorCode::InvariantViolation, v.rule + " at '" + v.id + "': " + v.detail, v.id);
  }

  TerminologyGraph g;
  for (auto& node : data.categories) {
    g.categories_.emplace(node.category_id, std::move(node));
  }
  for (const auto& [id, node] : g.categories_) {
    if (node.parent_id) g.children_[*node.parent_id].push_back(id);
    const CategoryNode* cur = &node;
    while (cur->parent_id) cur = &g.categories_.at(*cur->parent_id);
    g.branch_.emplace(id, cur->category_id);
    auto key = normalize_key(node.label);
    if (!key.empty()) g.lexicon_[key].categories.insert(id);
  }
  for (auto& c : data.concepts) {
    for (const auto& t : c.terms) g.lexicon_[normalize_key(t.surface)].concepts.insert(c.concept_id);
    g.concepts_.emplace(c.concept_id, std::move(c));
  }
  return g;
}

const Concept* TerminologyGraph::find_concept(std::string_view id) const {
  auto it = concepts_.find(std::string(id));
  return it == concepts_.end() ? nullptr : &it->second;
}

const CategoryNode* TerminologyGraph::find_category(std::string_view id) const {
  auto it = categories_.find(std::string(id));
  return it == categories_.end() ? nullptr : &it->second;
}

const std::vector<CategoryId>& TerminologyGraph::children(std::string_view id) const {
  auto it = children_.find(id);
  return it == children_.end() ? kNoChildren : it->second;
}

std::set<CategoryId> TerminologyGraph::descendants(std::string_view id) const {
  if (!has_category(id)) {
    throw Error(ErrorCode::UnknownCategory, "unknown category '" + std::string(id) + "'", std::string(id));
  }
  std::set<CategoryId> out;
  std::deque<std::string_view> queue{id};
  while (!queue.empty()) {
    auto cur = queue.front();
    queue.pop_front();
    out.emplace(cur);
    for (const auto& child : children(cur)) queue.push_back(child);
  }
  return out;
}

const CategoryId& TerminologyGraph::branch_of(std::string_view id) const {
  auto it = branch_.find(id);
  if (it == branch_.end()) {
    throw Error(ErrorCode::UnknownCategory, "unknown category '" + std::string(id) + "'", std::string(id));
  }
  return it->second;
}

const LexiconEntry* TerminologyGraph::lookup(const std::string& key) const {
  auto it = lexicon_.find(key);
  return it == lexicon_.end() ? nullptr : &it->second;
}

std::map<std::string, std::set<ConceptId>> TerminologyGraph::term_lexicon() const {
  std::map<std::string, std::set<ConceptId>> out;
  for (const auto& [key, entry] : lexicon_) {
    if (!entry.concepts.empty()) out.emplace(key, entry.concepts);
  }
  return out;
}

TerminologyData TerminologyGraph::data() const {
  TerminologyData d;
  for (const auto& [id, node] : categories_) d.categories.push_back(node);
  for (const auto& [id, c] : concepts_) d.concepts.push_back(c);
  return d;
}

TerminologyData parse_terminology(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  TerminologyData data;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return data;

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    malformed(e.what());
  }
  if (!doc.is_object()) malformed("top level must be an object");
  check_keys(doc, {"categories", "concepts"}, "document");

  if (auto it = doc.find("categories"); it != doc.end()) {
    if (!it->is_array()) malformed("'categories' must be an array");
    for (const auto& c : *it) {
      if (!c.is_object()) malformed("category entries must be objects");
      check_keys(c, {"category_id", "label", "level", "parent_id", "omics_field"}, "category");
      CategoryNode node;
      node.category_id = required_string(c, "category_id", "category");
      node.label = required_string(c, "label", "category '" + node.category_id + "'");
      if (auto p = c.find("parent_id"); p != c.end() && !p->is_null()) {
        if (!p->is_string()) malformed("parent_id must be a string");
        node.parent_id = p->get<std::string>();
      }
      node.level = 0;  // derived below when absent
      if (auto l = c.find("level"); l != c.end()) {
        if (!l->is_number_integer()) malformed("level must be an integer");
        node.level = l->get<int>();
      }
      if (auto f = c.find("omics_field"); f != c.end()) {
        auto field = f->is_string() ? parse_omics_field(f->get<std::string>()) : std::nullopt;
        if (!field) malformed("unknown omics_field in category '" + node.category_id + "'");
        node.omics_field = *field;
      }
      data.categories.push_back(std::move(node));
    }
  }

  // Fill in undeclared levels from the parent chain; validation catches the rest.
  std::map<std::string, const CategoryNode*> by_id;
  for (const auto& n : data.categories) by_id.emplace(n.category_id, &n);
  for (auto& n : data.categories) {
    if (n.level != 0) continue;
    int depth = 1;
    const CategoryNode* cur = &n;
    while (cur->parent_id && depth <= static_cast<int>(by_id.size())) {
      auto p = by_id.find(*cur->parent_id);
      if (p == by_id.end()) break;
      cur = p->second;
      ++depth;
    }
    n.level = depth;
  }

  if (auto it = doc.find("concepts"); it != doc.end()) {
    if (!it->is_array()) malformed("'concepts' must be an array");
    for (const auto& c : *it) {
      if (!c.is_object()) malformed("concept entries must be objects");
      check_keys(c, {"concept_id", "preferred_label", "terms", "linked_category_ids", "related_concept_ids"},
                 "concept");
      Concept con;
      con.concept_id = required_string(c, "concept_id", "concept");
      const std::string where = "concept '" + con.concept_id + "'";
      con.preferred_label = required_string(c, "preferred_label", where);
      if (auto t = c.find("terms"); t != c.end()) {
        if (!t->is_array()) malformed("'terms' must be an array in " + where);
        for (const auto& term : *t) {
          if (term.is_string()) {
            const auto surface = term.get<std::string>();
            con.terms.push_back({surface, surface == con.preferred_label ? TermKind::Preferred : TermKind::Synonym});
          } else if (term.is_object()) {
            check_keys(term, {"surface", "kind"}, "term");
            Term parsed;
            parsed.surface = required_string(term, "surface", where);
            if (auto k = term.find("kind"); k != term.end()) {
              auto kind = k->is_string() ? parse_term_kind(k->get<std::string>()) : std::nullopt;
              if (!kind) malformed("unknown term kind in " + where);
              parsed.kind = *kind;
            }
            con.terms.push_back(std::move(parsed));
          } else {
            malformed("terms must be strings or objects in " + where);
          }
        }
      }
      con.linked_category_ids = string_set<std::set<CategoryId>>(c, "linked_category_ids", where);
      con.related_concept_ids = string_set<std::set<ConceptId>>(c, "related_concept_ids", where);
      data.concepts.push_back(std::move(con));
    }
  }
  return data;
}

TerminologyGraph load_terminology(std::istream& in) { return TerminologyGraph::build(parse_terminology(in)); }

TerminologyGraph load_terminology_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MalformedDocument, "cannot open terminology file '" + path + "'", path);
  return load_terminology(in);
}

std::string serialize_terminology(const TerminologyGraph& graph) {
  json doc = json::object();
  doc["categories"] = json::array();
  doc["concepts"] = json::array();
  for (const auto& [id, node] : graph.categories()) {
    json c = {{"category_id", id}, {"label", node.label}, {"level", node.level},
              {"omics_field", std::string(to_string(node.omics_field))}};
    c["parent_id"] = node.parent_id ? json(*node.parent_id) : json(nullptr);
    doc["categories"].push_back(std::move(c));
  }
  for (const auto& [id, con] : graph.concepts()) {
    json terms = json::array();
    for (const auto& t : con.terms) terms.push_back({{"surface", t.surface}, {"kind", std::string(to_string(t.kind))}});
    doc["concepts"].push_back({{"concept_id", id},
                               {"preferred_label", con.preferred_label},
                               {"terms", std::move(terms)},
                               {"linked_category_ids", con.linked_category_ids},
                               {"related_concept_ids", con.related_concept_ids}});
  }
  return doc.dump(2) + "\n";
}

std::vector<ConceptMatch> resolve_token_spans(const std::vector<std::string>& tokens,
                                              const TerminologyGraph& graph) {
  std::vector<ConceptMatch> matches;
  std::size_t i = 0;
  while (i < tokens.size()) {
    const std::size_t longest = std::min(kMaxTermTokens, tokens.size() - i);
    bool matched = false;
    for (std::size_t len = longest; len >= 1; --len) {
      std::string key = tokens[i];
      for (std::size_t k = 1; k < len; ++k) key.append(" ").append(tokens[i + k]);
      if (const auto* entry = graph.lookup(key)) {
        matches.push_back({i, i + len,
                           std::vector<ConceptId>(entry->concepts.begin(), entry->concepts.end()),
                           std::vector<CategoryId>(entry->categories.begin(), entry->categories.end()),
                           std::move(key)});
        i += len;
        matched = true;
        break;
      }
    }
    if (!matched) ++i;
  }
  return matches;
}

std::vector<ConceptMatch> resolve_spans(std::string_view text, const TerminologyGraph& graph) {
  return resolve_token_spans(normalize_tokens(text), graph);
}

}  // namespace toolseek
