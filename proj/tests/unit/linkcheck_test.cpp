#include <gtest/gtest.h>

#include <thread>

#include "fixtures.hpp"
#include "httplib.h"
#include "toolseek/error.hpp"
#include "toolseek/linkcheck.hpp"

namespace toolseek {
namespace {

using namespace std::chrono_literals;
using testing::F1;

LinkPolicy fast_policy() {
  LinkPolicy p;
  p.timeout = 500ms;
  p.backoff = 1ms;
  p.host_spacing = 0ms;
  return p;
}

LinkProbe probe_at(const std::string& ts, LinkOutcome o) { return {parse_timestamp(ts), o, std::nullopt, {}}; }

TEST(Url, SplitAndOrigin) {
  const auto p = split_url("HTTPS://Example.ORG:8443/a/b?x=1#frag");
  ASSERT_TRUE(p);
  EXPECT_EQ(p->host, "example.org");
  EXPECT_EQ(p->port, 8443);
  EXPECT_EQ(p->target, "/a/b?x=1");
  EXPECT_EQ(p->origin(), "https://example.org:8443");
  EXPECT_EQ(split_url("http://h")->target, "/");
  EXPECT_EQ(split_url("http://h")->port, 80);
  EXPECT_FALSE(split_url("ftp://h/"));
  EXPECT_FALSE(split_url("http://h:70000/"));
  EXPECT_FALSE(split_url("not a url"));
}

TEST(Url, ResolveLocation) {
  const auto base = *split_url("http://h.org/dir/page?q=1");
  EXPECT_EQ(resolve_location(base, "https://x.org/y"), "https://x.org/y");
  EXPECT_EQ(resolve_location(base, "/root"), "http://h.org:80/root");
  EXPECT_EQ(resolve_location(base, "next"), "http://h.org:80/dir/next");
  EXPECT_EQ(resolve_location(base, "//cdn.org/z"), "http://cdn.org/z");
}

TEST(CheckUrl, OutcomeClassification) {
  MapTransport t;
  t.set("http://a/ok", HttpReply{200, {}});
  t.set("http://a/moved", HttpReply{301, "/ok"});
  t.set("http://a:80/ok", HttpReply{200, {}});
  t.set("http://a/gone", HttpReply{404, {}});
  t.set("http://a/err", HttpReply{500, {}});
  t.set("http://a/loop", HttpReply{302, "http://a/loop"});
  t.set("http://a/info", HttpReply{100, {}});
  const auto at = parse_timestamp("2016-10-18T00:00:00Z");
  const auto p = fast_policy();
  EXPECT_EQ(check_url("http://a/ok", p, t, at).outcome, LinkOutcome::Alive);
  EXPECT_EQ(check_url("http://a/moved", p, t, at).outcome, LinkOutcome::Alive);
  const auto gone = check_url("http://a/gone", p, t, at);
  EXPECT_EQ(gone.outcome, LinkOutcome::Broken);
  EXPECT_EQ(gone.http_status, 404);
  EXPECT_EQ(gone.at, at);
  EXPECT_EQ(check_url("http://a/err", p, t, at).outcome, LinkOutcome::Broken);
  EXPECT_EQ(check_url("http://a/loop", p, t, at).outcome, LinkOutcome::Unreachable);
  EXPECT_EQ(check_url("http://a/info", p, t, at).outcome, LinkOutcome::Unreachable);
  EXPECT_EQ(check_url("mailto:x", p, t, at).outcome, LinkOutcome::Unreachable);
}

TEST(CheckUrl, HeadFallsBackToGet) {
  class HeadRefused : public Transport {
   public:
    std::vector<std::string> methods;
    std::optional<HttpReply> request(std::string_view m, const std::string&, const LinkPolicy&) override {
      methods.emplace_back(m);
      return HttpReply{m == "HEAD" ? 405 : 200, {}};
    }
  } t;
  EXPECT_EQ(check_url("http://a/", fast_policy(), t, {}).outcome, LinkOutcome::Alive);
  EXPECT_EQ(t.methods, (std::vector<std::string>{"HEAD", "GET"}));
}

TEST(CheckUrl, RetriesOnlyWhenNoReply) {
  MapTransport t;
  t.set("http://a/gone", HttpReply{404, {}});
  auto p = fast_policy();
  p.retries = 2;
  EXPECT_EQ(check_url("http://down/", p, t, {}).outcome, LinkOutcome::Unreachable);
  EXPECT_EQ(t.calls().size(), 3u);
  check_url("http://a/gone", p, t, {});
  EXPECT_EQ(t.calls().size(), 4u);
}

TEST(CheckUrl, RedirectLimit) {
  MapTransport t;
  for (int i = 0; i < 6; ++i) t.set("http://a/" + std::to_string(i), HttpReply{302, "http://a/" + std::to_string(i + 1)});
  t.set("http://a/6", HttpReply{200, {}});
  auto p = fast_policy();
  p.max_redirects = 6;
  EXPECT_EQ(check_url("http://a/0", p, t, {}).outcome, LinkOutcome::Alive);
  p.max_redirects = 5;
  EXPECT_EQ(check_url("http://a/0", p, t, {}).outcome, LinkOutcome::Unreachable);
}

TEST(Obsolescence, Rules) {
  const LinkPolicy p;
  using O = LinkOutcome;
  EXPECT_EQ(classify_obsolete({}, p), CardStatus::Published);
  EXPECT_EQ(classify_obsolete({probe_at("2016-10-01T00:00:00Z", O::Broken), probe_at("2016-10-05T00:00:00Z", O::Broken),
                               probe_at("2016-10-08T00:00:00Z", O::Unreachable)},
                              p),
            CardStatus::Obsolete);
  // Three failures inside a week are not enough.
  EXPECT_EQ(classify_obsolete({probe_at("2016-10-01T00:00:00Z", O::Broken), probe_at("2016-10-05T00:00:00Z", O::Broken),
                               probe_at("2016-10-07T23:59:59Z", O::Broken)},
                              p),
            CardStatus::Published);
  // A week apart but only two failures.
  EXPECT_EQ(classify_obsolete({probe_at("2016-10-01T00:00:00Z", O::Broken), probe_at("2016-10-20T00:00:00Z", O::Broken)}, p),
            CardStatus::Published);
  // An alive probe resets the streak.
  EXPECT_EQ(classify_obsolete({probe_at("2016-10-01T00:00:00Z", O::Broken), probe_at("2016-10-05T00:00:00Z", O::Broken),
                               probe_at("2016-10-06T00:00:00Z", O::Alive), probe_at("2016-10-09T00:00:00Z", O::Broken)},
                              p),
            CardStatus::Published);
}

TEST(Policy, JsonRoundTripAndValidation) {
  LinkPolicy p;
  p.retries = 4;
  p.deny_hosts = {"bad.org"};
  p.obsolete_after_span = std::chrono::hours(24 * 3);
  const auto back = policy_from_json(policy_to_json(p));
  EXPECT_EQ(policy_to_json(back), policy_to_json(p));
  EXPECT_THROW(policy_from_json({{"retries", -1}}), Error);
  EXPECT_THROW(policy_from_json({{"colour", 1}}), Error);
  EXPECT_THROW(policy_from_json({{"timeout_ms", "slow"}}), Error);
}

TEST(HostGate, SpacesSameHostOnly) {
  HostGate gate(50ms);
  std::vector<std::chrono::steady_clock::time_point> starts, ends;
  std::mutex m;
  auto hit = [&](const std::string& host) {
    gate.with(host, [&] {
      std::lock_guard lock(m);
      starts.push_back(std::chrono::steady_clock::now());
      return 0;
    });
  };
  const auto t0 = std::chrono::steady_clock::now();
  std::thread a([&] { for (int i = 0; i < 3; ++i) hit("h1"); });
  std::thread b([&] { for (int i = 0; i < 3; ++i) hit("h1"); });
  a.join();
  b.join();
  std::sort(starts.begin(), starts.end());
  for (std::size_t i = 1; i < starts.size(); ++i) EXPECT_GE(starts[i] - starts[i - 1], 50ms);
  const auto t1 = std::chrono::steady_clock::now();
  hit("h2");
  EXPECT_LT(std::chrono::steady_clock::now() - t1, 40ms);
  EXPECT_GE(t1 - t0, 250ms);
}

TEST(Sweep, TransitionsAndAudit) {
  F1 f;
  auto& reg = f.catalog->registry();
  auto t = std::make_shared<MapTransport>();
  for (const auto& c : reg.cards()) t->set(c.homepage_url, HttpReply{200, {}});
  t->set(reg.get_tool(f["qcheck"]).homepage_url, HttpReply{404, {}});
  LinkChecker checker(reg, t, fast_policy(), f.clock.clock());

  for (int day = 0; day < 3; ++day) {
    const auto r = checker.run_sweep();
    EXPECT_EQ(r.probed, 4u);
    EXPECT_EQ(r.broken, 1u);
    EXPECT_TRUE(r.newly_obsolete.empty());
    f.clock.advance(std::chrono::hours(24 * 3));
  }
  const auto r = checker.run_sweep();
  EXPECT_EQ(r.newly_obsolete, std::vector<Accession>{f["qcheck"]});
  EXPECT_EQ(reg.get_tool(f["qcheck"]).status, CardStatus::Obsolete);
  EXPECT_EQ(reg.get_tool(f["qcheck"]).link_history.size(), 4u);
  // The snapshot follows the registry.
  EXPECT_FALSE(f.catalog->snapshot()->doc(*f.catalog->snapshot()->find(f["qcheck"])).card.status ==
               CardStatus::Published);

  const auto audit = reg.audit_log(f["qcheck"]);
  ASSERT_FALSE(audit.empty());
  EXPECT_EQ(audit.back().editor, kLinkCheckEditor);
  EXPECT_EQ(audit.back().field_path, "status");
  EXPECT_EQ(audit.back().new_value, "obsolete");

  t->set(reg.get_tool(f["qcheck"]).homepage_url, HttpReply{200, {}});
  const auto back = checker.run_sweep();
  EXPECT_EQ(back.restored, std::vector<Accession>{f["qcheck"]});
  EXPECT_EQ(reg.get_tool(f["qcheck"]).status, CardStatus::Published);
  EXPECT_EQ(reg.size(), 4u);
}

TEST(Sweep, DraftsSkippedAndHostsFiltered) {
  F1 f;
  auto& reg = f.catalog->registry();
  reg.submit_tool("drafty", "A draft.", "https://drafty.example.org/", "a@b.org");
  auto t = std::make_shared<MapTransport>();
  auto p = fast_policy();
  p.deny_hosts = {"qcheck.example.org"};
  LinkChecker checker(reg, t, p, f.clock.clock());
  const auto r = checker.run_sweep();
  EXPECT_EQ(r.probed, 3u);
  EXPECT_EQ(r.skipped, 1u);
  EXPECT_EQ(r.unreachable, 3u);
  for (const auto& call : t->calls()) {
    EXPECT_EQ(call.url.find("drafty"), std::string::npos);
    EXPECT_EQ(call.url.find("qcheck"), std::string::npos);
  }
  const auto j = sweep_to_json(r);
  EXPECT_EQ(j["skipped"], 1);
}

TEST(HttpTransport, TalksToARealServer) {
  httplib::Server server;
  server.Get("/ok", [](const httplib::Request&, httplib::Response& res) { res.set_content("x", "text/plain"); });
  server.Get("/moved", [](const httplib::Request&, httplib::Response& res) { res.set_redirect("/ok", 301); });
  server.Get("/gone", [](const httplib::Request&, httplib::Response& res) { res.status = 404; });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  const auto base = "http://127.0.0.1:" + std::to_string(port);
  HttpTransport t;
  const auto p = fast_policy();
  EXPECT_EQ(check_url(base + "/ok", p, t, {}).outcome, LinkOutcome::Alive);
  const auto moved = t.request("HEAD", base + "/moved", p);
  ASSERT_TRUE(moved);
  EXPECT_EQ(moved->status, 301);
  EXPECT_EQ(moved->location, "/ok");
  EXPECT_EQ(check_url(base + "/moved", p, t, {}).outcome, LinkOutcome::Alive);
  EXPECT_EQ(check_url(base + "/gone", p, t, {}).http_status, 404);
  server.stop();
  th.join();
  auto closed = p;
  closed.retries = 0;
  EXPECT_EQ(check_url(base + "/ok", closed, t, {}).outcome, LinkOutcome::Unreachable);
}

}  // namespace
}  // namespace toolseek
