#include "toolseek/ranking.hpp"

#include <algorithm>
#include <cmath>

#include "toolseek/error.hpp"
#include "toolseek/text.hpp"

namespace toolseek {

void RankWeights::validate() const {
  for (double w : {text, category, quality, community}) {
    if (!(w >= 0.0 && w <= 1.0)) throw Error(ErrorCode::InvalidWeights, "rank weights must lie in [0,1]");
  }
  const double sum = text + category + quality + community;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidWeights, "rank weights must sum to 1, got " + std::to_string(sum));
  }
}

nlohmann::json weights_to_json(const RankWeights& w) {
  return {{"text", w.text}, {"category", w.category}, {"quality", w.quality}, {"community", w.community}};
}

RankWeights weights_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::InvalidWeights, "rank_weights must be an object");
  RankWeights w;
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_number()) throw Error(ErrorCode::InvalidWeights, "weight '" + key + "' is not a number", key);
    const double v = value.get<double>();
    if (key == "text") {
      w.text = v;
    } else if (key == "category") {
      w.category = v;
    } else if (key == "quality") {
      w.quality = v;
    } else if (key == "community") {
      w.community = v;
    } else {
      throw Error(ErrorCode::InvalidWeights, "unknown weight '" + key + "'", key);
    }
  }
  w.validate();
  return w;
}

double bm25_idf(std::size_t doc_count, std::size_t document_frequency) {
  const double n = static_cast<double>(doc_count);
  const double df = static_cast<double>(document_frequency);
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

double bm25_term(double idf, std::uint32_t term_frequency, double doc_length, double avg_doc_length) {
  if (term_frequency == 0) return 0.0;
  const double tf = term_frequency;
  const double norm = avg_doc_length > 0 ? doc_length / avg_doc_length : 1.0;
  return idf * tf * (kBm25K1 + 1.0) / (tf + kBm25K1 * (1.0 - kBm25B + kBm25B * norm));
}

double text_relevance(const std::vector<TermStat>& terms, double doc_length, std::size_t doc_count,
                      double avg_doc_length) {
  double raw = 0;
  double bound = 0;
  for (const auto& t : terms) {
    const double idf = bm25_idf(doc_count, t.document_frequency);
    raw += bm25_term(idf, t.term_frequency, doc_length, avg_doc_length);
    bound += bm25_bound(idf);
  }
  if (bound <= 0) return 0.0;
  return std::clamp(raw / bound, 0.0, 1.0);
}

namespace {

bool label_mentions(const std::string& label, std::initializer_list<std::string_view> words) {
  const auto lower = ascii_lower(label);
  return std::any_of(words.begin(), words.end(),
                     [&](std::string_view w) { return lower.find(w) != std::string::npos; });
}

}  // namespace

QualityFlags quality_flags(const ToolCard& card) {
  QualityFlags f;
  f.alive = !card.link_history.empty() && card.link_history.back().outcome == LinkOutcome::Alive;
  for (const auto& [label, url] : card.spec.external_links) {
    if (label_mentions(label, {"doc", "manual", "wiki", "readme", "guide"})) f.documentation = true;
    if (label_mentions(label, {"tutorial"})) f.tutorial = true;
  }
  f.maintained = card.spec.maintained == Maintained::Yes;
  f.publications = card.publications.size();
  return f;
}

double quality_score(const QualityFlags& f) {
  const int flags = int(f.alive) + int(f.documentation) + int(f.tutorial) + int(f.maintained);
  const double pubs = std::min(1.0, std::log1p(static_cast<double>(f.publications)) / std::log(11.0));
  return 0.8 * flags / 4.0 + 0.2 * pubs;
}

double community_score(const RatingSummary& r) {
  return (static_cast<double>(r.sum) + kRatingPriorWeight * kRatingPriorMean) /
         ((static_cast<double>(r.count) + kRatingPriorWeight) * 5.0);
}

double community_score(const std::vector<int>& ratings) {
  RatingSummary r;
  for (int x : ratings) r.sum += x;
  r.count = ratings.size();
  return community_score(r);
}

ScoredResult combine_score(const Accession& accession, const Signals& s, const RankWeights& weights,
                           ActiveSignals active) {
  weights.validate();
  double wt = active.text ? weights.text : 0.0;
  double wc = active.category ? weights.category : 0.0;
  double wq = weights.quality;
  double wm = weights.community;
  const double mass = wt + wc + wq + wm;
  if (mass <= 0) throw Error(ErrorCode::InvalidWeights, "no weight left on the active signals");
  wt /= mass;
  wc /= mass;
  wq /= mass;
  wm /= mass;

  ScoredResult r;
  r.accession = accession;
  r.signals = s;
  r.explanation = {
      {"text_relevance", wt, s.text_relevance, wt * s.text_relevance},
      {"category_match", wc, s.category_match, wc * s.category_match},
      {"quality", wq, s.quality, wq * s.quality},
      {"community", wm, s.community, wm * s.community},
  };
  for (const auto& c : r.explanation) r.final_score += c.contribution;
  r.final_score = std::clamp(r.final_score, 0.0, 1.0);
  return r;
}

bool ranks_before(const ScoredResult& a, const ScoredResult& b) {
  if (a.final_score != b.final_score) return a.final_score > b.final_score;
  if (a.signals.quality != b.signals.quality) return a.signals.quality > b.signals.quality;
  return a.accession < b.accession;
}

}  // namespace toolseek
