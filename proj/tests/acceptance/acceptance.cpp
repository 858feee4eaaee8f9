// Runs each acceptance criterion once and prints one PASS/FAIL line per
// criterion. Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "fixtures.hpp"
#include "generators.hpp"
#include "harness.hpp"
#include "httplib.h"
#include "oracle.hpp"
#include "toolseek/catalog.hpp"
#include "toolseek/error.hpp"
#include "toolseek/identifiers.hpp"
#include "toolseek/linkcheck.hpp"

namespace toolseek::acceptance {
namespace {

using namespace std::chrono_literals;
using Clock = std::chrono::steady_clock;
using testing::Rng;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++count_;
  }
  bool ok() const { return count_ == 0; }
  Outcome finish(std::string summary) const {
    if (ok()) return {true, std::move(summary)};
    std::string d = summary + "; " + std::to_string(count_) + " failure(s):";
    for (const auto& f : failures_) d += " [" + f + "]";
    return {false, d};
  }

 private:
  std::vector<std::string> failures_;
  std::size_t count_ = 0;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(double v, int digits = 3) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  const auto start = Clock::now();
  Rng rng(20161018);
  Check check;
  std::size_t queries = 0, hits = 0;
  std::map<QueryMode, std::size_t> modes;
  for (int c = 0; c < 20; ++c) {
    const auto corpus = testing::random_corpus(100, rng);
    const auto snap = testing::index_corpus(corpus);
    const testing::Oracle oracle(corpus.terminology, corpus.cards, corpus.ratings);
    for (int i = 0; i < 200; ++i) {
      const auto q = testing::random_query(corpus, rng);
      ++queries;
      ++modes[q.mode];
      const auto expected = oracle.search(q);
      try {
        const auto engine = testing::run_engine(q, snap);
        hits += engine.ranked.size();
        if (auto diff = testing::compare_with_oracle(engine, expected)) {
          check.expect(false, "corpus " + std::to_string(c) + " '" + q.text + "': " + *diff);
          continue;
        }
        std::vector<Accession> accs;
        for (const auto& h : expected) accs.push_back(h.accession);
        const auto want = oracle.facets(accs);
        std::size_t n = 0;
        bool same = true;
        for (const auto& [dim, values] : engine.facets)
          for (const auto& [value, count] : values) {
            ++n;
            const auto it = want.find({std::string(to_string(dim)), value});
            same = same && it != want.end() && it->second == count;
          }
        check.expect(same && n == want.size(), "facets differ for '" + q.text + "'");
      } catch (const Error& e) {
        check.expect(false, "'" + q.text + "' raised " + std::string(error_code_name(e.code())));
      }
    }
  }
  const double elapsed = seconds_since(start);
  check.expect(elapsed < 60.0, "runtime " + fmt(elapsed) + " s");
  return check.finish(std::to_string(queries) + " queries over 20 corpora (natural " +
                      std::to_string(modes[QueryMode::Natural]) + ", boolean " +
                      std::to_string(modes[QueryMode::Boolean]) + ", category " +
                      std::to_string(modes[QueryMode::Category]) + ", acronym " +
                      std::to_string(modes[QueryMode::Acronym]) + "), " + std::to_string(hits) + " hits, " +
                      fmt(elapsed, 1) + " s");
}

// ---------------------------------------------------------------------------

std::set<Accession> category_hits(const std::string& id, const IndexSnapshot& snap) {
  const auto plan = compile_plan(parse_query("cat:" + id), {}, snap.graph(), true);
  std::set<Accession> out;
  for (DocId d : match_documents(plan, snap)) out.insert(snap.doc(d).card.accession);
  return out;
}

Outcome subsumption() {
  Rng rng(7001);
  Check check;
  std::size_t trees = 0, nodes = 0, largest = 0, compared = 0;
  for (int t = 0; t < 50; ++t) {
    // Even trees post on leaves only; odd trees post anywhere.
    testing::CardShape shape;
    shape.leaves_only = t % 2 == 0;
    shape.draft_rate = 0.05;
    const testing::TreeShape tree{2000, 1 + rng() % 20};
    const auto corpus = testing::random_corpus(400, rng, shape, tree);
    const auto snap = testing::index_corpus(corpus);
    const auto& graph = snap.graph();
    ++trees;
    nodes += graph.categories().size();
    largest = std::max(largest, graph.categories().size());
    check.expect(graph.categories().size() <= 2000, "tree larger than 2000 nodes");

    // Direct postings from the cards themselves, not the index.
    std::map<std::string, std::set<Accession>> direct;
    for (const auto& card : corpus.cards) {
      if (card.status == CardStatus::Draft) continue;
      for (const auto& c : card.category_ids) direct[c].insert(card.accession);
    }
    std::map<std::string, std::set<Accession>> hits;
    for (const auto& [id, node] : graph.categories()) hits[id] = category_hits(id, snap);

    for (const auto& [id, node] : graph.categories()) {
      std::set<Accession> via_leaves, via_all;
      for (const auto& d : graph.descendants(id)) {
        via_all.insert(direct[d].begin(), direct[d].end());
        if (graph.children(d).empty()) via_leaves.insert(hits[d].begin(), hits[d].end());
      }
      ++compared;
      check.expect(hits[id] == via_all, "tree " + std::to_string(t) + " " + id + ": hits differ from descendant postings");
      if (shape.leaves_only) {
        check.expect(hits[id] == via_leaves, "tree " + std::to_string(t) + " " + id + ": hits differ from leaf union");
      }
    }
  }
  return check.finish(std::to_string(trees) + " trees, " + std::to_string(nodes) + " categories (largest " +
                      std::to_string(largest) + "), " + std::to_string(compared) + " set comparisons");
}

// ---------------------------------------------------------------------------

std::size_t peak_rss_kib() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("VmHWM:", 0) == 0) return std::stoul(line.substr(6));
  }
  return 0;
}

Outcome full_scale() {
  Rng rng(18500);
  Check check;
  const auto corpus = testing::full_scale_corpus(rng);
  std::size_t terms = 0;
  for (const auto& c : corpus.terminology.concepts) terms += c.terms.size();
  check.expect(corpus.cards.size() == testing::kFullTools, "tool count");
  check.expect(corpus.terminology.concepts.size() == testing::kFullConcepts, "concept count");
  check.expect(terms == testing::kFullTerms, "term count " + std::to_string(terms));

  const auto build_start = Clock::now();
  const auto snap = testing::index_corpus(corpus);
  const double build = seconds_since(build_start);
  check.expect(build <= 60.0, "index build " + fmt(build) + " s");

  const auto ctx = testing::parse_context(snap);
  std::vector<double> latencies;
  constexpr int kQueries = 1000;
  for (int i = 0; i < kQueries; ++i) {
    const auto q = testing::random_query(corpus, rng);
    const auto t0 = Clock::now();
    try {
      const auto plan = compile_plan(parse_query(q.text, ctx), q.filters, snap.graph(), q.include_obsolete);
      execute_search(plan, snap, {}, 1, 20);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyPlan) check.expect(false, q.text + ": " + e.what());
      continue;
    }
    latencies.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
  }
  std::sort(latencies.begin(), latencies.end());
  const double p95 = latencies.empty() ? 0 : latencies[std::min(latencies.size() - 1, latencies.size() * 95 / 100)];
  const double p50 = latencies.empty() ? 0 : latencies[latencies.size() / 2];
  check.expect(latencies.size() >= kQueries * 9 / 10, "too few timed queries");
  check.expect(p95 <= 50.0, "p95 " + fmt(p95) + " ms");
  const double rss_mib = peak_rss_kib() / 1024.0;
  check.expect(rss_mib > 0 && rss_mib <= 1024.0, "peak RSS " + fmt(rss_mib, 1) + " MiB");
  return check.finish(std::to_string(snap.doc_count()) + " docs, " + std::to_string(corpus.terminology.concepts.size()) +
                      " concepts / " + std::to_string(terms) + " terms; build " + fmt(build, 2) + " s, p50 " +
                      fmt(p50) + " ms, p95 " + fmt(p95) + " ms over " + std::to_string(latencies.size()) +
                      " queries, peak RSS " + fmt(rss_mib, 1) + " MiB");
}

// ---------------------------------------------------------------------------

Outcome rating_fixture() {
  Check check;
  testing::F1 f;
  const auto& community = f.catalog->community();
  const auto samtools = f["samtools"];
  const auto reviews = community.reviews(samtools);
  check.expect(reviews.size() == 4, "review count");
  for (const auto& r : reviews) check.expect(r.rating == 5, "rating " + std::to_string(r.rating));
  const auto agg = community.aggregate_rating(samtools);
  check.expect(agg.mean && *agg.mean == 5.0, "mean is not exactly 5.0");

  const double score = community_score(community.rating_summary(samtools));
  // Independent arithmetic: (4*5 + 5*3.5) / ((4+5)*5).
  const double exact = (4 * 5 + 5 * 3.5) / ((4 + 5) * 5.0);
  check.expect(std::abs(score - exact) <= 1e-6, "score " + fmt(score, 9));
  check.expect(std::round(score * 1e4) / 1e4 == 0.8333, "score does not round to 0.8333");

  // The ranking signal carried by search results is the same number.
  const auto hit = f.catalog->search({"SAMtools", {}, false, 1, 1}).results.at(0);
  check.expect(std::abs(hit.scored.signals.community - exact) <= 1e-6, "search signal differs");
  return check.finish("mean " + fmt(agg.mean.value_or(-1), 1) + ", community_score " + fmt(score, 6) +
                      " (exact 37.5/45 = " + fmt(exact, 9) + ")");
}

// ---------------------------------------------------------------------------

Outcome parser_round_trip() {
  Rng rng(1000);
  Check check;
  std::size_t n = 0;
  while (n < 1000) {
    const auto corpus = testing::random_corpus(5, rng);
    for (int i = 0; i < 100 && n < 1000; ++i, ++n) {
      const auto node = testing::random_boolean(corpus, rng, 1 + static_cast<int>(rng() % 5));
      auto text = testing::render(node);
      if (node.kind != testing::GenNode::Kind::And && node.kind != testing::GenNode::Kind::Or) text = "(" + text + ")";
      if (text.size() > kMaxQueryLength) {
        --i;
        --n;
        continue;
      }
      try {
        const auto first = parse_query(text);
        check.expect(first.mode == QueryMode::Boolean, "not boolean: " + text);
        const auto again = parse_query(serialize_query(first));
        check.expect(again == first, "round trip changed " + text);
      } catch (const Error& e) {
        check.expect(false, text + " raised " + e.what());
      }
    }
  }
  struct Case {
    std::string query;
    std::size_t position;
  };
  const std::vector<Case> cases{
      {"alignment AND", 13},             // dangling operator
      {"(alignment OR bam", 17},         // unbalanced parenthesis
      {"alignment AND \"bam files", 14},  // unbalanced quote
  };
  std::string positions;
  for (const auto& c : cases) {
    try {
      parse_query(c.query);
      check.expect(false, "no error for " + c.query);
    } catch (const Error& e) {
      check.expect(e.code() == ErrorCode::SyntaxError, c.query + " raised " + std::string(error_code_name(e.code())));
      check.expect(e.position() == c.position, c.query + " position " + std::to_string(e.position().value_or(999)));
      positions += (positions.empty() ? "" : ", ") + std::to_string(e.position().value_or(999));
    }
  }
  return check.finish(std::to_string(n) + " boolean queries round-tripped; SyntaxError positions " + positions);
}

// ---------------------------------------------------------------------------

// HTTP stub: routes for each outcome, an access log, and one URL whose
// answer is switched between sweeps.
class StubServer {
 public:
  StubServer() {
    server_.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response&) {
      std::lock_guard lock(mutex_);
      log_.push_back({req.get_header_value("Host"), req.path, Clock::now()});
      return httplib::Server::HandlerResponse::Unhandled;
    });
    server_.Get("/ok", [](const httplib::Request&, httplib::Response& res) { res.set_content("ok", "text/plain"); });
    server_.Get("/moved", [](const httplib::Request&, httplib::Response& res) { res.set_redirect("/ok", 301); });
    server_.Get("/gone", [](const httplib::Request&, httplib::Response& res) { res.status = 404; });
    server_.Get("/err", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
    server_.Get("/slow", [](const httplib::Request&, httplib::Response& res) {
      std::this_thread::sleep_for(1500ms);
      res.set_content("late", "text/plain");
    });
    server_.Get("/flaky", [this](const httplib::Request&, httplib::Response& res) {
      res.status = flaky_alive ? 200 : 503;
    });
    port_ = server_.bind_to_any_port("0.0.0.0");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  struct Entry {
    std::string host;
    std::string path;
    Clock::time_point at;
  };
  std::vector<Entry> log() const {
    std::lock_guard lock(mutex_);
    return log_;
  }
  std::string url(const std::string& ip, const std::string& path) const {
    return "http://" + ip + ":" + std::to_string(port_) + path;
  }

  std::atomic<bool> flaky_alive{true};

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  mutable std::mutex mutex_;
  std::vector<Entry> log_;
};

// Reference rule, written against the schedule rather than the checker:
// obsolete once the current run of failures has at least three probes and
// its first and last probe are seven or more days apart.
struct ExpectedCard {
  std::vector<std::pair<std::int64_t, bool>> probes;  // (sim seconds, alive)
  bool obsolete() const {
    std::size_t run = 0;
    for (auto it = probes.rbegin(); it != probes.rend() && !it->second; ++it) ++run;
    if (run < 3) return false;
    return probes.back().first - probes[probes.size() - run].first >= 7 * 86400;
  }
};

Outcome link_checker() {
  Check check;
  StubServer stub;
  const std::string a = "127.0.0.1", b = "127.0.0.2";

  // Outcome classification against the live stub.
  LinkPolicy probe_policy;
  probe_policy.timeout = 400ms;
  probe_policy.backoff = 50ms;
  probe_policy.host_spacing = 0ms;
  HttpTransport http;
  struct Probe {
    std::string path;
    LinkOutcome outcome;
    std::optional<int> status;
  };
  const std::vector<Probe> expected_probes{{"/ok", LinkOutcome::Alive, 200},
                                           {"/moved", LinkOutcome::Alive, 200},
                                           {"/gone", LinkOutcome::Broken, 404},
                                           {"/err", LinkOutcome::Broken, 500},
                                           {"/slow", LinkOutcome::Unreachable, std::nullopt}};
  std::string classified;
  for (const auto& p : expected_probes) {
    const auto got = check_url(stub.url(a, p.path), probe_policy, http, {});
    check.expect(got.outcome == p.outcome && got.http_status == p.status,
                 p.path + " -> " + std::string(to_string(got.outcome)) + " " +
                     (got.http_status ? std::to_string(*got.http_status) : "none"));
    classified += (classified.empty() ? "" : ", ") + p.path.substr(1) + "=" + std::string(to_string(got.outcome));
  }

  // Sweeps over a catalog whose homepages live on the stub, two hosts.
  testing::SimClock sim;
  Catalog catalog(testing::f1_graph(), std::make_shared<MemoryStore>(), std::make_shared<MockMintingClient>(),
                  sim.clock());
  const std::vector<std::pair<std::string, std::string>> homes{
      {a, "/ok"}, {a, "/moved"}, {a, "/slow"}, {b, "/gone"}, {b, "/err"}, {b, "/flaky"}};
  std::istringstream fixture(testing::read_file(testing::fixture_path("f1_tools.jsonl")));
  std::ostringstream records;
  std::string line;
  std::vector<nlohmann::json> base;
  while (std::getline(fixture, line)) base.push_back(nlohmann::json::parse(line));
  for (std::size_t i = 0; i < homes.size(); ++i) {
    auto rec = base[i % base.size()];
    rec.erase("link_history");
    rec["name"] = "probe" + std::to_string(i);
    rec["homepage_url"] = stub.url(homes[i].first, homes[i].second);
    records << rec.dump() << "\n";
  }
  std::istringstream in(records.str());
  const auto report = catalog.registry().ingest_records(in);
  check.expect(report.accepted == homes.size(), "ingest accepted " + std::to_string(report.accepted));

  LinkPolicy sweep_policy;
  sweep_policy.timeout = 400ms;
  sweep_policy.retries = 1;
  sweep_policy.backoff = 50ms;
  sweep_policy.host_spacing = 500ms;
  LinkChecker checker(catalog.registry(), std::make_shared<HttpTransport>(), sweep_policy, sim.clock());

  // Days between consecutive sweeps, and whether /flaky answers.
  const std::vector<int> gaps{0, 1, 3, 1, 2, 4, 1, 1, 5, 2};
  const std::vector<bool> flaky{true, false, false, false, true, false, false, false, false, true};
  std::map<std::string, ExpectedCard> expected;
  std::size_t transitions = 0;
  const auto start_sim = sim.now();
  const auto log_mark = stub.log().size();
  for (std::size_t s = 0; s < gaps.size(); ++s) {
    sim.advance(std::chrono::hours(24 * gaps[s]));
    stub.flaky_alive = flaky[s];
    const auto before = catalog.registry().size();
    const auto docs_before = catalog.snapshot()->doc_count();
    const auto sweep = checker.run_sweep();
    transitions += sweep.newly_obsolete.size() + sweep.restored.size();
    check.expect(sweep.probed == homes.size(), "sweep " + std::to_string(s) + " probed " + std::to_string(sweep.probed));
    check.expect(catalog.registry().size() == before && before == homes.size(), "card count changed");
    check.expect(catalog.snapshot()->doc_count() == docs_before, "indexed card count changed");

    const auto t = std::chrono::duration_cast<std::chrono::seconds>(sim.now() - start_sim).count();
    for (std::size_t i = 0; i < homes.size(); ++i) {
      const auto& path = homes[i].second;
      const bool alive = path == "/ok" || path == "/moved" || (path == "/flaky" && flaky[s]);
      auto& e = expected[path];
      e.probes.emplace_back(t, alive);
      const auto card = catalog.registry().get_tool(*catalog.registry().find_by_name("probe" + std::to_string(i)));
      const auto want = e.obsolete() ? CardStatus::Obsolete : CardStatus::Published;
      check.expect(card.status == want, "sweep " + std::to_string(s) + " " + path + " is " +
                                            std::string(to_string(card.status)));
      check.expect(card.link_history.size() == s + 1, "history length for " + path);
    }
  }
  check.expect(transitions > 0, "no status transition was exercised");

  // Per-host spacing from the server's own log, sweeps only.
  std::map<std::string, std::vector<Clock::time_point>> by_host;
  const auto log = stub.log();
  for (auto i = log_mark; i < log.size(); ++i) by_host[log[i].host].push_back(log[i].at);
  double min_gap_ms = 1e9;
  std::size_t sweep_requests = 0;
  for (const auto& [host, times] : by_host) {
    for (std::size_t i = 1; i < times.size(); ++i) {
      min_gap_ms = std::min(min_gap_ms, std::chrono::duration<double, std::milli>(times[i] - times[i - 1]).count());
      ++sweep_requests;
    }
  }
  check.expect(by_host.size() == 2, "expected two hosts in the access log, saw " + std::to_string(by_host.size()));
  check.expect(min_gap_ms >= 500.0, "min same-host gap " + fmt(min_gap_ms, 1) + " ms");

  std::string final_status;
  for (std::size_t i = 0; i < homes.size(); ++i) {
    const auto card = catalog.registry().get_tool(*catalog.registry().find_by_name("probe" + std::to_string(i)));
    final_status += (final_status.empty() ? "" : ", ") + homes[i].second.substr(1) + "=" + std::string(to_string(card.status));
  }
  return check.finish("classified " + classified + "; 10 sweeps, " + std::to_string(transitions) +
                      " transitions, final " + final_status + "; min same-host gap " + fmt(min_gap_ms, 1) +
                      " ms over " + std::to_string(sweep_requests) + " intervals");
}

// ---------------------------------------------------------------------------

Outcome identifiers() {
  Check check;
  MockMintingClient minter;
  Rng rng(10000);
  std::set<std::string> dois;
  std::vector<std::pair<Accession, std::string>> inputs;
  const std::string alphabet = "abcXYZ019._-+ /";
  for (std::uint32_t i = 0; i < 10000; ++i) {
    std::string label = std::to_string(i / 100) + "." + std::to_string(i % 100);
    // Free-text tails; sanitization must not merge distinct inputs here.
    if (rng() % 3 == 0) label += "rc" + std::string(1, alphabet[rng() % 6]);
    inputs.emplace_back(Accession(1 + i % 997), label);
  }
  std::set<std::pair<std::uint32_t, std::string>> distinct;
  for (const auto& [acc, label] : inputs) distinct.insert({acc.number(), label});
  std::map<std::pair<std::uint32_t, std::string>, std::string> first;
  for (const auto& [acc, label] : inputs) {
    const auto doi = mint_doi(acc, label, minter).str();
    check.expect(validate_doi(doi), "invalid " + doi);
    dois.insert(doi);
    first[{acc.number(), label}] = doi;
  }
  check.expect(dois.size() == distinct.size() && distinct.size() == 10000,
               std::to_string(dois.size()) + " distinct DOIs for " + std::to_string(distinct.size()) + " inputs");
  std::size_t repeats = 0;
  for (const auto& [acc, label] : inputs) {
    if (rng() % 5) continue;
    ++repeats;
    check.expect(mint_doi(acc, label, minter).str() == first[{acc.number(), label}], "mint not idempotent");
  }

  // Counter persistence across simulated restarts.
  testing::TempDir dir;
  const auto counter = dir.path() / "accession.counter";
  std::set<std::uint32_t> issued;
  std::uint32_t last = 0;
  for (int life = 0; life < 5; ++life) {
    AccessionAllocator alloc(counter);
    for (int i = 0; i < 200; ++i) {
      const auto a = alloc.next();
      check.expect(issued.insert(a.number()).second, "reused " + a.str());
      check.expect(a.number() > last, "not increasing at " + a.str());
      last = a.number();
    }
  }
  // The same through the registry over a file store.
  const auto store = dir.path() / "store";
  const auto terms = testing::fixture_path("f1_terminology.json");
  std::set<Accession> registry_issued;
  for (int life = 0; life < 3; ++life) {
    auto catalog = Catalog::open(store, terms);
    for (int i = 0; i < 5; ++i) {
      const auto card = catalog->registry().submit_tool("tool-" + std::to_string(life) + "-" + std::to_string(i),
                                                        "Restart probe.", "https://x.example.org/", "a@x.org");
      check.expect(registry_issued.insert(card.accession).second, "registry reused " + card.accession.str());
    }
  }
  check.expect(registry_issued.size() == 15 && registry_issued.rbegin()->number() == 15, "registry numbering");
  return check.finish(std::to_string(dois.size()) + " distinct valid DOIs, " + std::to_string(repeats) +
                      " idempotent re-mints, " + std::to_string(issued.size()) +
                      " accessions over 5 allocator restarts, " + std::to_string(registry_issued.size()) +
                      " over 3 registry restarts");
}

// ---------------------------------------------------------------------------

struct Answer {
  std::vector<std::pair<Accession, double>> ranked;
  FacetCounts facets;
  std::optional<ErrorCode> error;
  bool operator==(const Answer&) const = default;
};

Answer answer(const testing::GenQuery& q, const IndexSnapshot& snap) {
  Answer a;
  try {
    const auto r = testing::run_engine(q, snap);
    for (const auto& s : r.ranked) a.ranked.emplace_back(s.accession, s.final_score);
    a.facets = r.facets;
  } catch (const Error& e) {
    a.error = e.code();
  }
  return a;
}

Outcome rebuild_equivalence() {
  Rng rng(5050);
  Check check;
  std::size_t events_total = 0, queries = 0;
  for (int s = 0; s < 50; ++s) {
    auto corpus = testing::random_corpus(60, rng);
    auto snap = build_index({}, corpus.graph);
    std::map<Accession, ToolCard> current;
    std::map<Accession, RatingSummary> ratings;
    std::uint64_t seq = 0;
    const auto events = 20 + rng() % 80;
    for (std::size_t e = 0; e < events; ++e) {
      ToolCard card;
      const auto roll = rng() % 6;
      if (current.empty() || roll == 0) {
        card = testing::random_card(static_cast<std::uint32_t>(current.size() + 1), corpus.terminology,
                                    corpus.vocabulary, {}, rng);
      } else {
        card = std::next(current.begin(), static_cast<long>(rng() % current.size()))->second;
        const auto fresh =
            testing::random_card(card.accession.number(), corpus.terminology, corpus.vocabulary, {}, rng);
        switch (roll) {
          case 1: card.description = fresh.description; break;
          case 2: card.category_ids = fresh.category_ids; break;
          case 3: card.status = fresh.status; break;
          case 4: card.spec = fresh.spec; break;
          default: break;  // rating-only change
        }
      }
      auto& r = ratings[card.accession];
      if (roll == 5 || rng() % 4 == 0) {
        r.sum += 1 + static_cast<long>(rng() % 5);
        ++r.count;
      }
      current[card.accession] = card;
      snap = apply_update(snap, {++seq, card, r});
    }
    events_total += events;
    std::vector<ToolCard> cards;
    for (const auto& [a, c] : current) cards.push_back(c);
    // Rebuild from the cards in shuffled order so doc ids differ.
    std::shuffle(cards.begin(), cards.end(), rng);
    const auto full = build_index(cards, corpus.graph, [&](const Accession& a) { return ratings.at(a); });
    check.expect(full.doc_count() == snap.doc_count(), "doc count differs in sequence " + std::to_string(s));
    corpus.cards = cards;
    for (int i = 0; i < 100; ++i, ++queries) {
      const auto q = testing::random_query(corpus, rng);
      check.expect(answer(q, snap) == answer(q, full), "sequence " + std::to_string(s) + " '" + q.text + "'");
    }
  }
  return check.finish("50 sequences, " + std::to_string(events_total) + " events, " + std::to_string(queries) +
                      " queries compared");
}

}  // namespace
}  // namespace toolseek::acceptance

int main() {
  using namespace toolseek::acceptance;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"oracle-equivalence", oracle_equivalence}, {"subsumption-law", subsumption},
      {"full-scale-benchmark", full_scale},     {"rating-fixture", rating_fixture},
      {"parser-round-trip", parser_round_trip},   {"link-checker", link_checker},
      {"identifiers", identifiers},               {"rebuild-equivalence", rebuild_equivalence},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("aborted: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
