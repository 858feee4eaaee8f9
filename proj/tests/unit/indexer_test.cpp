#include <gtest/gtest.h>

#include <numeric>
#include <set>

#include "fixtures.hpp"
#include "generators.hpp"
#include "harness.hpp"
#include "toolseek/error.hpp"
#include "toolseek/indexer.hpp"

namespace toolseek {
namespace {

using testing::F1;

std::set<std::string> names_of(const IndexSnapshot& s, const std::vector<DocId>* ids) {
  std::set<std::string> out;
  if (ids)
    for (DocId d : *ids) out.insert(s.doc(d).card.name);
  return out;
}

TEST(BuildIndex, F1Postings) {
  F1 f1;
  const auto snap = f1.catalog->snapshot();
  EXPECT_EQ(snap->doc_count(), 4u);
  EXPECT_EQ(names_of(*snap, snap->category_postings("HTS.WGS.SNP")), (std::set<std::string>{"samtools", "snpfindr"}));
  EXPECT_EQ(names_of(*snap, snap->facet_docs(FacetDimension::OperatingSystem, "Windows")),
            (std::set<std::string>{"qcheck"}));
  EXPECT_EQ(names_of(*snap, snap->facet_docs(FacetDimension::Technology, "HTS")).size(), 4u);
  EXPECT_EQ(snap->category_postings("HTS.WGS"), nullptr);  // leaf postings only
  EXPECT_EQ(names_of(*snap, snap->facet_docs(FacetDimension::Interface, "graphical-interface")),
            (std::set<std::string>{"qcheck"}));
}

TEST(BuildIndex, EmptyCorpus) {
  const auto snap = build_index({}, testing::f1_graph());
  EXPECT_EQ(snap.doc_count(), 0u);
  EXPECT_TRUE(snap.terms().empty());
  EXPECT_TRUE(snap.posted_categories().empty());
  EXPECT_EQ(snap.avg_doc_length(), 0.0);
  EXPECT_EQ(snap.generation(), 1u);
}

TEST(BuildIndex, SkipsDraftsAndBumpsGeneration) {
  F1 f1;
  auto cards = f1.catalog->registry().cards();
  cards[0].status = CardStatus::Draft;
  const auto snap = build_index(cards, testing::f1_graph(), {}, 7);
  EXPECT_EQ(snap.doc_count(), 3u);
  EXPECT_EQ(snap.generation(), 8u);
  EXPECT_FALSE(snap.find(cards[0].accession));
}

// Posting-list integrity and length statistics against a naive recount.
TEST(IndexProperty, PostingsMatchNaiveTally) {
  testing::Rng rng(31);
  for (int round = 0; round < 20; ++round) {
    const auto corpus = testing::random_corpus(100, rng);
    const auto snap = testing::index_corpus(corpus);
    std::set<std::pair<std::string, Accession>> pairs;
    std::size_t docs = 0;
    double total = 0;
    for (const auto& card : corpus.cards) {
      if (card.status == CardStatus::Draft) continue;
      ++docs;
      std::string text = card.name + " " + card.description + " " + card.spec.software_type + " " + card.spec.license;
      for (const auto& l : card.spec.programming_languages) text += " " + l;
      const auto toks = testing::Oracle::tokenize(text);
      total += static_cast<double>(toks.size());
      for (const auto& t : toks) pairs.insert({t, card.accession});
    }
    ASSERT_EQ(snap.doc_count(), docs);
    std::size_t df_sum = 0;
    for (const auto& term : snap.terms()) {
      const auto* pl = snap.postings(term);
      ASSERT_NE(pl, nullptr);
      df_sum += pl->document_frequency();
      for (std::size_t i = 0; i < pl->entries.size(); ++i) {
        ASSERT_GE(pl->entries[i].term_frequency, 1u);
        if (i > 0) ASSERT_LT(pl->entries[i - 1].doc, pl->entries[i].doc);
        ASSERT_LT(pl->entries[i].doc, snap.doc_count());
        ASSERT_TRUE(pairs.count({term, snap.doc(pl->entries[i].doc).card.accession}));
      }
    }
    EXPECT_EQ(df_sum, pairs.size());
    double lengths = 0;
    for (DocId d = 0; d < snap.doc_count(); ++d) lengths += snap.doc(d).doc_length();
    EXPECT_EQ(lengths, total);
    if (docs > 0) EXPECT_DOUBLE_EQ(snap.avg_doc_length(), lengths / static_cast<double>(docs));
  }
}

std::vector<std::pair<Accession, double>> ranked(const IndexSnapshot& snap, const testing::GenQuery& q) {
  std::vector<std::pair<Accession, double>> out;
  try {
    for (const auto& r : testing::run_engine(q, snap).ranked) out.emplace_back(r.accession, r.final_score);
  } catch (const Error& e) {
    out.emplace_back(Accession(999999), static_cast<double>(e.code()));
  }
  return out;
}

TEST(ApplyUpdate, AddingACardEqualsRebuild) {
  F1 f1(false);
  const auto base = build_index(f1.catalog->registry().cards(), testing::f1_graph(), {}, 0, 4);
  auto cards = f1.catalog->registry().cards();
  ToolCard extra = cards[1];
  extra.accession = Accession(5);
  extra.name = "qcheck2";
  const auto inc = apply_update(base, {5, extra, {}});
  cards.push_back(extra);
  const auto full = build_index(cards, testing::f1_graph());
  EXPECT_EQ(inc.doc_count(), 5u);
  EXPECT_EQ(inc.generation(), base.generation() + 1);
  EXPECT_EQ(inc.terms(), full.terms());
  EXPECT_EQ(inc.total_length(), full.total_length());
  for (const auto& t : full.terms()) EXPECT_EQ(inc.postings(t)->document_frequency(), full.postings(t)->document_frequency());
}

TEST(ApplyUpdate, NoOpEditKeepsAnswers) {
  F1 f1(false);
  const auto cards = f1.catalog->registry().cards();
  const auto base = build_index(cards, testing::f1_graph(), {}, 0, 4);
  const auto same = apply_update(base, {5, cards[0], {}});
  EXPECT_NE(same.generation(), base.generation());
  EXPECT_EQ(same.terms(), base.terms());
  EXPECT_EQ(same.facet_index(), base.facet_index());
}

TEST(ApplyUpdate, ObsoleteCardStaysInDocTable) {
  F1 f1(false);
  auto cards = f1.catalog->registry().cards();
  const auto base = build_index(cards, testing::f1_graph(), {}, 0, 4);
  auto snp = *std::find_if(cards.begin(), cards.end(), [](const ToolCard& c) { return c.name == "snpfindr"; });
  snp.status = CardStatus::Obsolete;
  const auto next = apply_update(base, {5, snp, {}});
  const auto id = next.find(snp.accession);
  ASSERT_TRUE(id);
  EXPECT_TRUE(next.doc(*id).obsolete());
  testing::GenQuery q;
  q.mode = QueryMode::Category;
  q.text = "cat:HTS.WGS.SNP";
  const auto hits = testing::run_engine(q, next);
  ASSERT_EQ(hits.ranked.size(), 1u);
  EXPECT_EQ(hits.ranked[0].accession, f1["samtools"]);
  q.include_obsolete = true;
  EXPECT_EQ(testing::run_engine(q, next).ranked.size(), 2u);
}

TEST(ApplyUpdate, RejectsStaleEvents) {
  F1 f1(false);
  const auto cards = f1.catalog->registry().cards();
  const auto base = build_index(cards, testing::f1_graph(), {}, 0, 10);
  try {
    apply_update(base, {10, cards[0], {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StaleEvent);
  }
}

TEST(ApplyUpdate, SharesUntouchedPostingLists) {
  F1 f1(false);
  auto cards = f1.catalog->registry().cards();
  const auto base = build_index(cards, testing::f1_graph(), {}, 0, 4);
  cards[2].description = "entirely fresh words";
  const auto next = apply_update(base, {5, cards[2], {}});
  EXPECT_EQ(next.postings("bam"), base.postings("bam"));  // same list object
  EXPECT_NE(next.postings("fresh"), nullptr);
  EXPECT_EQ(base.postings("fresh"), nullptr);
}

// Folding random change events gives the same answers as a rebuild over the
// final card set.
TEST(IndexProperty, IncrementalEqualsRebuild) {
  testing::Rng rng(32);
  for (int round = 0; round < 10; ++round) {
    auto corpus = testing::random_corpus(40, rng);
    auto snap = build_index({}, corpus.graph);
    std::map<Accession, ToolCard> current;
    std::map<Accession, RatingSummary> ratings;
    std::uint64_t seq = 0;
    const auto events = 1 + rng() % 50;
    for (std::size_t e = 0; e < events; ++e) {
      ToolCard card;
      if (current.empty() || rng() % 3 == 0) {
        card = testing::random_card(static_cast<std::uint32_t>(current.size() + 1), corpus.terminology,
                                    corpus.vocabulary, {}, rng);
      } else {
        auto it = std::next(current.begin(), static_cast<long>(rng() % current.size()));
        card = it->second;
        auto fresh = testing::random_card(card.accession.number(), corpus.terminology, corpus.vocabulary, {}, rng);
        switch (rng() % 4) {
          case 0: card.description = fresh.description; break;
          case 1: card.category_ids = fresh.category_ids; break;
          case 2: card.status = fresh.status; break;
          default: card = fresh;
        }
      }
      RatingSummary r{static_cast<long>(rng() % 20), rng() % 5};
      current[card.accession] = card;
      ratings[card.accession] = r;
      snap = apply_update(snap, {++seq, card, r});
    }
    std::vector<ToolCard> cards;
    for (const auto& [a, c] : current) cards.push_back(c);
    const auto full = build_index(cards, corpus.graph, [&](const Accession& a) { return ratings.at(a); });
    corpus.cards = cards;
    for (int i = 0; i < 30; ++i) {
      const auto q = testing::random_query(corpus, rng);
      ASSERT_EQ(ranked(snap, q), ranked(full, q)) << q.text;
    }
  }
}

}  // namespace
}  // namespace toolseek
