#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "toolseek/identifiers.hpp"
#include "toolseek/model.hpp"

namespace toolseek {

inline constexpr double kBm25K1 = 1.2;
inline constexpr double kBm25B = 0.75;
inline constexpr double kRatingPriorMean = 3.5;
inline constexpr double kRatingPriorWeight = 5.0;

struct RankWeights {
  double text = 0.5;
  double category = 0.2;
  double quality = 0.2;
  double community = 0.1;

  // Throws Error(InvalidWeights) unless each weight is in [0,1] and they sum
  // to 1 within 1e-9.
  void validate() const;
  bool operator==(const RankWeights&) const = default;
};

nlohmann::json weights_to_json(const RankWeights& w);
// Accepts {"text", "category", "quality", "community"}; validates.
RankWeights weights_from_json(const nlohmann::json& doc);

struct Signals {
  double text_relevance = 0;
  double category_match = 0;
  double quality = 0;
  double community = 0;

  bool operator==(const Signals&) const = default;
};

// Signals that are meaningless for a plan (no text terms, no categories) are
// switched off and the weight mass is spread over the rest.
struct ActiveSignals {
  bool text = true;
  bool category = true;
};

struct Contribution {
  std::string signal;
  double weight = 0;
  double value = 0;
  double contribution = 0;
};

struct ScoredResult {
  Accession accession;
  Signals signals;
  double final_score = 0;
  std::vector<Contribution> explanation;
};

struct TermStat {
  std::size_t document_frequency = 0;
  std::uint32_t term_frequency = 0;  // 0 when the doc lacks the term
};

double bm25_idf(std::size_t doc_count, std::size_t document_frequency);
double bm25_term(double idf, std::uint32_t term_frequency, double doc_length, double avg_doc_length);
// Upper bound of bm25_term as tf grows without limit.
inline double bm25_bound(double idf) { return idf * (kBm25K1 + 1.0); }

// One entry per distinct query term. Raw BM25 divided by the sum of the
// per-term bounds, so the result is in [0,1]; 0 with no terms.
double text_relevance(const std::vector<TermStat>& terms, double doc_length, std::size_t doc_count,
                      double avg_doc_length);

struct QualityFlags {
  bool alive = false;
  bool documentation = false;
  bool tutorial = false;
  bool maintained = false;
  std::size_t publications = 0;
};

// alive follows the latest probe; documentation/tutorial come from the
// labels of spec.external_links.
QualityFlags quality_flags(const ToolCard& card);
double quality_score(const QualityFlags& flags);
inline double quality_score(const ToolCard& card) { return quality_score(quality_flags(card)); }

double community_score(const RatingSummary& ratings);
double community_score(const std::vector<int>& ratings);

// Throws Error(InvalidWeights) for invalid weights.
ScoredResult combine_score(const Accession& accession, const Signals& signals, const RankWeights& weights,
                           ActiveSignals active = {});

// Ranking order: final score desc, quality desc, accession asc.
bool ranks_before(const ScoredResult& a, const ScoredResult& b);

}  // namespace toolseek
