#include "toolseek/query.hpp"

#include <algorithm>
#include <cctype>

#include "toolseek/error.hpp"
#include "toolseek/text.hpp"

namespace toolseek {

std::string_view to_string(QueryMode mode) {
  switch (mode) {
    case QueryMode::Natural:
      return "natural";
    case QueryMode::Boolean:
      return "boolean";
    case QueryMode::Category:
      return "category";
    case QueryMode::Acronym:
      return "acronym";
  }
  return "?";
}

QueryNode QueryNode::term(std::string token) {
  QueryNode n;
  n.kind = Kind::Term;
  n.tokens = {std::move(token)};
  return n;
}

QueryNode QueryNode::phrase(std::vector<std::string> tokens) {
  if (tokens.size() == 1) return term(std::move(tokens.front()));
  QueryNode n;
  n.kind = Kind::Phrase;
  n.tokens = std::move(tokens);
  return n;
}

QueryNode QueryNode::category(std::string id) {
  QueryNode n;
  n.kind = Kind::Category;
  n.text = std::move(id);
  return n;
}

QueryNode QueryNode::acronym(std::string name_key) {
  QueryNode n;
  n.kind = Kind::Acronym;
  n.text = std::move(name_key);
  return n;
}

QueryNode QueryNode::branch(Kind kind, std::vector<QueryNode> children) {
  QueryNode n;
  n.kind = kind;
  n.children = std::move(children);
  return n;
}

std::size_t QueryNode::depth() const {
  std::size_t d = 0;
  for (const auto& c : children) d = std::max(d, c.depth());
  return d + 1;
}

namespace {

constexpr std::string_view kCategoryPrefix = "cat:";

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::size_t code_points(std::string_view s, std::size_t byte_end) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < byte_end && i < s.size(); ++i)
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) ++n;
  return n;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool is_operator_word(std::string_view w) { return w == "AND" || w == "OR" || w == "NOT"; }

// Upper-case dotted id such as HTS.WGS.SNP.
bool looks_like_category_id(std::string_view w) {
  if (w.find('.') == std::string_view::npos || w.front() == '.' || w.back() == '.') return false;
  bool letter = false;
  for (char c : w) {
    if (std::isupper(static_cast<unsigned char>(c))) {
      letter = true;
    } else if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-')) {
      return false;
    }
  }
  return letter && w.find("..") == std::string_view::npos;
}

std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) words.push_back(s.substr(start, i - start));
  }
  return words;
}

void check_length(std::string_view query) {
  if (code_points(query, query.size()) > kMaxQueryLength) {
    throw Error(ErrorCode::QueryTooLong,
                "query exceeds " + std::to_string(kMaxQueryLength) + " characters", "q");
  }
}

enum class Tok { LParen, RParen, Phrase, Word, And, Or, Not, End };

struct Lexeme {
  Tok kind = Tok::End;
  std::string_view text;
  std::size_t pos = 0;  // byte offset
};

class BooleanParser {
 public:
  explicit BooleanParser(std::string_view src) : src_(src) { lex(); }

  QueryNode parse() {
    auto node = parse_or();
    if (peek().kind != Tok::End) fail(peek().pos, "unexpected " + describe(peek()));
    return node;
  }

 private:
  [[noreturn]] void fail(std::size_t byte_pos, const std::string& what) const {
    const auto pos = code_points(src_, byte_pos);
    throw Error(ErrorCode::SyntaxError, what + " at position " + std::to_string(pos), "q", pos);
  }

  static std::string describe(const Lexeme& l) {
    switch (l.kind) {
      case Tok::End:
        return "end of query";
      case Tok::RParen:
        return "')'";
      case Tok::LParen:
        return "'('";
      default:
        return "'" + std::string(l.text) + "'";
    }
  }

  void lex() {
    std::size_t i = 0;
    while (i < src_.size()) {
      const char c = src_[i];
      if (is_space(c)) {
        ++i;
      } else if (c == '(' || c == ')') {
        lexemes_.push_back({c == '(' ? Tok::LParen : Tok::RParen, src_.substr(i, 1), i});
        ++i;
      } else if (c == '"') {
        const auto close = src_.find('"', i + 1);
        if (close == std::string_view::npos) fail(i, "unterminated quote");
        lexemes_.push_back({Tok::Phrase, src_.substr(i + 1, close - i - 1), i});
        i = close + 1;
      } else {
        const std::size_t start = i;
        while (i < src_.size() && !is_space(src_[i]) && src_[i] != '(' && src_[i] != ')' && src_[i] != '"') ++i;
        const auto word = src_.substr(start, i - start);
        Tok kind = Tok::Word;
        if (word == "AND") kind = Tok::And;
        if (word == "OR") kind = Tok::Or;
        if (word == "NOT") kind = Tok::Not;
        lexemes_.push_back({kind, word, start});
      }
    }
    lexemes_.push_back({Tok::End, {}, src_.size()});
  }

  const Lexeme& peek() const { return lexemes_[next_]; }
  const Lexeme& take() { return lexemes_[next_++]; }

  QueryNode parse_or() {
    std::vector<QueryNode> parts{parse_and()};
    while (peek().kind == Tok::Or) {
      take();
      parts.push_back(parse_and());
    }
    return parts.size() == 1 ? std::move(parts.front()) : QueryNode::branch(QueryNode::Kind::Or, std::move(parts));
  }

  QueryNode parse_and() {
    std::vector<QueryNode> parts{parse_unary()};
    while (peek().kind == Tok::And) {
      take();
      parts.push_back(parse_unary());
    }
    return parts.size() == 1 ? std::move(parts.front()) : QueryNode::branch(QueryNode::Kind::And, std::move(parts));
  }

  QueryNode parse_unary() {
    if (peek().kind == Tok::Not) {
      take();
      std::vector<QueryNode> child;
      child.push_back(parse_atom());
      return QueryNode::branch(QueryNode::Kind::Not, std::move(child));
    }
    return parse_atom();
  }

  QueryNode parse_atom() {
    const Lexeme lex = take();
    switch (lex.kind) {
      case Tok::LParen: {
        if (++nesting_ > kMaxQueryDepth) {
          throw Error(ErrorCode::DepthExceeded, "query nesting exceeds " + std::to_string(kMaxQueryDepth), "q",
                      code_points(src_, lex.pos));
        }
        auto inner = parse_or();
        if (peek().kind != Tok::RParen) fail(peek().pos, "expected ')' but found " + describe(peek()));
        take();
        --nesting_;
        return inner;
      }
      case Tok::Phrase: {
        auto tokens = normalize_tokens(lex.text);
        if (tokens.empty()) fail(lex.pos, "empty phrase");
        return QueryNode::phrase(std::move(tokens));
      }
      case Tok::Word: {
        if (lex.text.substr(0, kCategoryPrefix.size()) == kCategoryPrefix) {
          const auto id = lex.text.substr(kCategoryPrefix.size());
          if (id.empty()) fail(lex.pos, "missing category id");
          return QueryNode::category(std::string(id));
        }
        auto tokens = normalize_tokens(lex.text);
        if (tokens.empty()) fail(lex.pos, "term has no letters or digits");
        return QueryNode::phrase(std::move(tokens));
      }
      default:
        fail(lex.pos, "expected a term but found " + describe(lex));
    }
  }

  std::string_view src_;
  std::vector<Lexeme> lexemes_;
  std::size_t next_ = 0;
  std::size_t nesting_ = 0;
};

void check_negation(const QueryNode& node, const QueryNode* parent) {
  if (node.kind == QueryNode::Kind::Not) {
    const bool anchored = parent && parent->kind == QueryNode::Kind::And &&
                          std::any_of(parent->children.begin(), parent->children.end(),
                                      [](const QueryNode& c) { return c.kind != QueryNode::Kind::Not; });
    if (!anchored) {
      throw Error(ErrorCode::PureNegation, "NOT needs a positive sibling under AND", "q");
    }
  }
  for (const auto& c : node.children) check_negation(c, &node);
}

}  // namespace

QueryMode classify_query(std::string_view query, const ParseContext& ctx) {
  if (query.find_first_of("()\"") != std::string_view::npos) return QueryMode::Boolean;
  const auto words = split_words(query);
  if (std::any_of(words.begin(), words.end(), is_operator_word)) return QueryMode::Boolean;
  if (words.size() == 1) {
    const auto w = words.front();
    if (w.substr(0, kCategoryPrefix.size()) == kCategoryPrefix) return QueryMode::Category;
    if (ctx.graph ? ctx.graph->has_category(w) : looks_like_category_id(w)) return QueryMode::Category;
  }
  if (ctx.is_tool_name) {
    const auto key = normalize_key(query);
    if (!key.empty() && ctx.is_tool_name(key)) return QueryMode::Acronym;
  }
  return QueryMode::Natural;
}

QueryNode parse_boolean(std::string_view query) {
  check_length(query);
  auto ast = BooleanParser(query).parse();
  check_negation(ast, nullptr);
  if (ast.depth() > kMaxQueryDepth) {
    throw Error(ErrorCode::DepthExceeded, "query depth exceeds " + std::to_string(kMaxQueryDepth), "q");
  }
  return ast;
}

ParsedQuery parse_query(std::string_view query, const ParseContext& ctx) {
  check_length(query);
  ParsedQuery out;
  out.mode = classify_query(query, ctx);
  switch (out.mode) {
    case QueryMode::Boolean:
      out.ast = parse_boolean(query);
      break;
    case QueryMode::Category: {
      auto w = trim(query);
      if (w.substr(0, kCategoryPrefix.size()) == kCategoryPrefix) w.remove_prefix(kCategoryPrefix.size());
      if (w.empty()) throw Error(ErrorCode::SyntaxError, "missing category id at position 4", "q", 4);
      out.ast = QueryNode::category(std::string(w));
      break;
    }
    case QueryMode::Acronym:
      out.ast = QueryNode::acronym(normalize_key(query));
      break;
    case QueryMode::Natural: {
      std::vector<QueryNode> terms;
      for (auto& t : normalize_tokens(query)) terms.push_back(QueryNode::term(std::move(t)));
      out.ast = terms.size() == 1 ? std::move(terms.front()) : QueryNode::branch(QueryNode::Kind::Or, std::move(terms));
      break;
    }
  }
  return out;
}

std::string serialize_ast(const QueryNode& node) {
  using K = QueryNode::Kind;
  switch (node.kind) {
    case K::Term:
      return node.tokens.front();
    case K::Phrase:
      return "\"" + join_tokens(node.tokens) + "\"";
    case K::Category:
      return std::string(kCategoryPrefix) + node.text;
    case K::Acronym:
      return node.text;
    case K::Not:
      return "NOT " + serialize_ast(node.children.front());
    case K::And:
    case K::Or: {
      std::string out = "(";
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i) out += node.kind == K::And ? " AND " : " OR ";
        out += serialize_ast(node.children[i]);
      }
      return out + ")";
    }
  }
  return {};
}

std::string serialize_query(const ParsedQuery& query) {
  switch (query.mode) {
    case QueryMode::Boolean: {
      auto text = serialize_ast(query.ast);
      const bool grouped = query.ast.kind == QueryNode::Kind::And || query.ast.kind == QueryNode::Kind::Or;
      return grouped ? text : "(" + text + ")";
    }
    case QueryMode::Category:
      return std::string(kCategoryPrefix) + query.ast.text;
    case QueryMode::Acronym:
      return query.ast.text;
    case QueryMode::Natural: {
      std::vector<std::string> tokens;
      if (query.ast.kind == QueryNode::Kind::Term) tokens = query.ast.tokens;
      for (const auto& c : query.ast.children) tokens.push_back(c.tokens.front());
      return join_tokens(tokens);
    }
  }
  return {};
}

FilterSet& FilterSet::add(FacetDimension dimension, std::set<std::string> values) {
  clauses.push_back({dimension, std::move(values)});
  return *this;
}

void validate_filters(const FilterSet& filters, const TerminologyGraph& graph) {
  for (const auto& clause : filters.clauses) {
    const auto dim = std::string(to_string(clause.dimension));
    if (clause.values.empty()) throw Error(ErrorCode::BadFacetValue, "empty " + dim + " filter", dim);
    for (const auto& v : clause.values) {
      if (v.empty()) throw Error(ErrorCode::BadFacetValue, "empty " + dim + " value", dim);
      switch (clause.dimension) {
        case FacetDimension::Category:
          if (!graph.has_category(v)) throw Error(ErrorCode::UnknownCategory, "unknown category '" + v + "'", dim);
          break;
        case FacetDimension::Technology: {
          const auto* node = graph.find_category(v);
          if (!node || node->parent_id) {
            throw Error(ErrorCode::BadFacetValue, "'" + v + "' is not a top-level category", dim);
          }
          break;
        }
        case FacetDimension::Interface:
          if (!parse_interface(v)) throw Error(ErrorCode::BadFacetValue, "unknown interface '" + v + "'", dim);
          break;
        default:
          break;
      }
    }
  }
}

std::string leaf_key(const QueryNode& leaf) {
  switch (leaf.kind) {
    case QueryNode::Kind::Category:
      return "cat:" + leaf.text;
    case QueryNode::Kind::Acronym:
      return "name:" + leaf.text;
    default:
      return "text:" + join_tokens(leaf.tokens);
  }
}

bool QueryPlan::browse() const {
  return mode == QueryMode::Natural && residual_terms.empty() && concept_matches.empty();
}

namespace {

void require_category(const TerminologyGraph& graph, const std::string& id) {
  if (!graph.has_category(id)) throw Error(ErrorCode::UnknownCategory, "unknown category '" + id + "'", "q");
}

std::set<CategoryId> expand(const TerminologyGraph& graph, const std::set<CategoryId>& roots) {
  std::set<CategoryId> out;
  for (const auto& c : roots) {
    if (!graph.has_category(c)) continue;
    auto d = graph.descendants(c);
    out.insert(d.begin(), d.end());
  }
  return out;
}

// Categories contributed by one match: label hits plus concept links.
std::set<CategoryId> match_categories(const ConceptMatch& m, const TerminologyGraph& graph) {
  std::set<CategoryId> roots(m.category_ids.begin(), m.category_ids.end());
  for (const auto& id : m.concept_ids) {
    if (const auto* c = graph.find_concept(id)) roots.insert(c->linked_category_ids.begin(), c->linked_category_ids.end());
  }
  return roots;
}

void push_distinct(std::vector<std::string>& out, const std::string& t) {
  if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
}

void compile_boolean(const QueryNode& node, bool negated, QueryPlan& plan, const TerminologyGraph& graph) {
  using K = QueryNode::Kind;
  if (node.kind == K::And || node.kind == K::Or || node.kind == K::Not) {
    for (const auto& c : node.children) compile_boolean(c, negated || node.kind == K::Not, plan, graph);
    return;
  }
  std::set<CategoryId> cats;
  if (node.kind == K::Category) {
    require_category(graph, node.text);
    cats = graph.descendants(node.text);
  } else {
    const auto key = join_tokens(node.tokens);
    if (const auto* entry = graph.lookup(key)) {
      ConceptMatch m{0, node.tokens.size(), {entry->concepts.begin(), entry->concepts.end()},
                     {entry->categories.begin(), entry->categories.end()}, key};
      cats = expand(graph, match_categories(m, graph));
      if (!negated) plan.concept_matches.push_back(std::move(m));
    } else if (!negated) {
      for (const auto& t : node.tokens) push_distinct(plan.residual_terms, t);
    }
    if (!negated)
      for (const auto& t : node.tokens) push_distinct(plan.text_terms, t);
  }
  if (!negated) plan.expanded_categories.insert(cats.begin(), cats.end());
  plan.leaf_categories[leaf_key(node)] = std::move(cats);
}

}  // namespace

QueryPlan compile_plan(const ParsedQuery& query, const FilterSet& filters, const TerminologyGraph& graph,
                       bool include_obsolete) {
  validate_filters(filters, graph);
  QueryPlan plan;
  plan.mode = query.mode;
  plan.ast = query.ast;
  plan.filters = filters;
  plan.include_obsolete = include_obsolete;

  switch (query.mode) {
    case QueryMode::Category:
      require_category(graph, query.ast.text);
      plan.expanded_categories = graph.descendants(query.ast.text);
      break;
    case QueryMode::Acronym:
      for (const auto& t : normalize_tokens(query.ast.text)) push_distinct(plan.text_terms, t);
      break;
    case QueryMode::Boolean:
      compile_boolean(query.ast, false, plan, graph);
      break;
    case QueryMode::Natural: {
      std::vector<std::string> tokens;
      if (query.ast.kind == QueryNode::Kind::Term) tokens = query.ast.tokens;
      for (const auto& c : query.ast.children) tokens.push_back(c.tokens.front());
      plan.concept_matches = resolve_token_spans(tokens, graph);
      std::vector<bool> absorbed(tokens.size(), false);
      for (const auto& m : plan.concept_matches) {
        for (auto i = m.begin; i < m.end; ++i) absorbed[i] = true;
        auto cats = expand(graph, match_categories(m, graph));
        plan.expanded_categories.insert(cats.begin(), cats.end());
      }
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!absorbed[i]) plan.residual_terms.push_back(tokens[i]);
        push_distinct(plan.text_terms, tokens[i]);
      }
      if (tokens.empty() && filters.empty()) {
        throw Error(ErrorCode::EmptyPlan, "query has no terms, categories or filters", "q");
      }
      break;
    }
  }
  return plan;
}

}  // namespace toolseek
