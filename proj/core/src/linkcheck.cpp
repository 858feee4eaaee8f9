#include "toolseek/linkcheck.hpp"

#include <algorithm>
#include <atomic>
#include <regex>
#include <thread>

#include "httplib.h"
#include "toolseek/error.hpp"
#include "toolseek/text.hpp"

namespace toolseek {

using nlohmann::json;

nlohmann::json policy_to_json(const LinkPolicy& p) {
  return {{"timeout_ms", p.timeout.count()},
          {"retries", p.retries},
          {"backoff_ms", p.backoff.count()},
          {"max_redirects", p.max_redirects},
          {"host_spacing_ms", p.host_spacing.count()},
          {"parallelism", p.parallelism},
          {"obsolete_after_failures", p.obsolete_after_failures},
          {"obsolete_after_days", std::chrono::duration_cast<std::chrono::hours>(p.obsolete_after_span).count() / 24},
          {"user_agent", p.user_agent},
          {"allow_hosts", p.allow_hosts},
          {"deny_hosts", p.deny_hosts}};
}

LinkPolicy policy_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::ValidationFailed, "linkcheck policy must be an object", "linkcheck");
  LinkPolicy p;
  try {
    for (const auto& [key, v] : doc.items()) {
      if (key == "timeout_ms") {
        p.timeout = std::chrono::milliseconds(v.get<long>());
      } else if (key == "retries") {
        p.retries = v.get<int>();
      } else if (key == "backoff_ms") {
        p.backoff = std::chrono::milliseconds(v.get<long>());
      } else if (key == "max_redirects") {
        p.max_redirects = v.get<int>();
      } else if (key == "host_spacing_ms") {
        p.host_spacing = std::chrono::milliseconds(v.get<long>());
      } else if (key == "parallelism") {
        p.parallelism = v.get<std::size_t>();
      } else if (key == "obsolete_after_failures") {
        p.obsolete_after_failures = v.get<int>();
      } else if (key == "obsolete_after_days") {
        p.obsolete_after_span = std::chrono::hours(24 * v.get<long>());
      } else if (key == "user_agent") {
        p.user_agent = v.get<std::string>();
      } else if (key == "allow_hosts") {
        p.allow_hosts = v.get<std::set<std::string>>();
      } else if (key == "deny_hosts") {
        p.deny_hosts = v.get<std::set<std::string>>();
      } else {
        throw Error(ErrorCode::ValidationFailed, "unknown linkcheck setting '" + key + "'", "linkcheck." + key);
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ValidationFailed, std::string("bad linkcheck setting: ") + e.what(), "linkcheck");
  }
  if (p.parallelism == 0 || p.retries < 0 || p.max_redirects < 0 || p.obsolete_after_failures < 1) {
    throw Error(ErrorCode::ValidationFailed, "linkcheck policy values out of range", "linkcheck");
  }
  return p;
}

std::string UrlParts::origin() const { return scheme + "://" + host + ":" + std::to_string(port); }

std::optional<UrlParts> split_url(std::string_view url) {
  static const std::regex re(R"(^(https?)://([^/:?#\s]+)(?::(\d{1,5}))?([^#\s]*)(?:#.*)?$)", std::regex::icase);
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(url.begin(), url.end(), m, re)) return std::nullopt;
  UrlParts p;
  p.scheme = ascii_lower(m[1].str());
  p.host = ascii_lower(m[2].str());
  p.port = m[3].matched ? std::stoi(m[3].str()) : (p.scheme == "https" ? 443 : 80);
  if (p.port <= 0 || p.port > 65535) return std::nullopt;
  p.target = m[4].str();
  if (p.target.empty() || p.target.front() != '/') p.target = "/" + p.target;
  return p;
}

std::string resolve_location(const UrlParts& base, std::string_view location) {
  if (split_url(location)) return std::string(location);
  const std::string prefix = base.scheme + "://" + base.host + ":" + std::to_string(base.port);
  if (location.substr(0, 2) == "//") return base.scheme + ":" + std::string(location);
  if (!location.empty() && location.front() == '/') return prefix + std::string(location);
  auto dir = base.target.substr(0, base.target.find('?'));
  dir = dir.substr(0, dir.rfind('/') + 1);
  return prefix + dir + std::string(location);
}

std::optional<HttpReply> HttpTransport::request(std::string_view method, const std::string& url,
                                                const LinkPolicy& policy) {
  const auto parts = split_url(url);
  if (!parts) return std::nullopt;
  httplib::Client client(parts->origin());
  client.set_connection_timeout(policy.timeout);
  client.set_read_timeout(policy.timeout);
  client.set_write_timeout(policy.timeout);
  client.set_follow_location(false);
  const httplib::Headers headers{{"User-Agent", policy.user_agent}};
  auto res = method == "HEAD" ? client.Head(parts->target, headers) : client.Get(parts->target, headers);
  if (!res) return std::nullopt;
  HttpReply reply{res->status, std::nullopt};
  if (res->has_header("Location")) reply.location = res->get_header_value("Location");
  return reply;
}

void MapTransport::set(std::string url, std::optional<HttpReply> reply) {
  std::lock_guard lock(mutex_);
  replies_.insert_or_assign(std::move(url), std::move(reply));
}

std::optional<HttpReply> MapTransport::request(std::string_view method, const std::string& url, const LinkPolicy&) {
  std::lock_guard lock(mutex_);
  calls_.push_back({std::string(method), url, std::chrono::steady_clock::now()});
  auto it = replies_.find(url);
  return it == replies_.end() ? std::nullopt : it->second;
}

std::vector<MapTransport::Call> MapTransport::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::shared_ptr<MapTransport> MapTransport::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::MalformedDocument, "stub map must be an object");
  auto t = std::make_shared<MapTransport>();
  for (const auto& [url, v] : doc.items()) {
    if (v.is_number_integer()) {
      t->set(url, HttpReply{v.get<int>(), std::nullopt});
    } else if (v.is_string() && v.get<std::string>() == "unreachable") {
      t->set(url, std::nullopt);
    } else if (v.is_object() && v.contains("status") && v["status"].is_number_integer()) {
      HttpReply r{v["status"].get<int>(), std::nullopt};
      if (v.contains("location")) r.location = v["location"].get<std::string>();
      t->set(url, r);
    } else {
      throw Error(ErrorCode::MalformedDocument, "bad stub entry for " + url, url);
    }
  }
  return t;
}

HostGate::Slot& HostGate::acquire(const std::string& host) {
  std::unique_lock lock(mutex_);
  auto& slot = slots_[host];
  cv_.wait(lock, [&] { return !slot.busy; });
  slot.busy = true;
  const auto ready = slot.last_end ? *slot.last_end + spacing_ : std::chrono::steady_clock::time_point{};
  lock.unlock();
  std::this_thread::sleep_until(ready);
  return slot;
}

void HostGate::release(Slot& slot) {
  {
    std::lock_guard lock(mutex_);
    slot.last_end = std::chrono::steady_clock::now();
    slot.busy = false;
  }
  cv_.notify_all();
}

namespace {

bool is_redirect(int status) {
  return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

struct Attempt {
  LinkOutcome outcome = LinkOutcome::Unreachable;
  std::optional<int> status;
  bool retryable = false;
};

Attempt follow(const std::string& url, const LinkPolicy& policy, Transport& transport, HostGate* gate) {
  std::string current = url;
  for (int hops = 0;; ++hops) {
    const auto parts = split_url(current);
    if (!parts) return {LinkOutcome::Unreachable, std::nullopt, false};
    auto exchange = [&](std::string_view method) { return transport.request(method, current, policy); };
    auto send = [&](std::string_view method) {
      return gate ? gate->with(parts->origin(), [&] { return exchange(method); }) : exchange(method);
    };
    auto reply = send("HEAD");
    if (reply && (reply->status == 405 || reply->status == 501)) reply = send("GET");
    if (!reply) return {LinkOutcome::Unreachable, std::nullopt, true};

    const int status = reply->status;
    if (is_redirect(status) && reply->location) {
      // Too many hops: not alive, and no 4xx/5xx to call it broken.
      if (hops >= policy.max_redirects) return {LinkOutcome::Unreachable, status, false};
      current = resolve_location(*parts, *reply->location);
      continue;
    }
    if (status >= 200 && status <= 399) return {LinkOutcome::Alive, status, false};
    if (status >= 400 && status <= 599) return {LinkOutcome::Broken, status, false};
    return {LinkOutcome::Unreachable, status, false};
  }
}

}  // namespace

LinkProbe check_url(const std::string& url, const LinkPolicy& policy, Transport& transport, Timestamp at,
                    HostGate* gate) {
  const auto start = std::chrono::steady_clock::now();
  Attempt result;
  for (int attempt = 0;; ++attempt) {
    result = follow(url, policy, transport, gate);
    if (!result.retryable || attempt >= policy.retries) break;
    std::this_thread::sleep_for(policy.backoff * (1 << attempt));
  }
  LinkProbe probe;
  probe.at = at;
  probe.outcome = result.outcome;
  probe.http_status = result.status;
  probe.latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  return probe;
}

CardStatus classify_obsolete(const std::vector<LinkProbe>& history, const LinkPolicy& policy) {
  std::size_t streak = 0;
  while (streak < history.size() && history[history.size() - 1 - streak].outcome != LinkOutcome::Alive) ++streak;
  if (streak < static_cast<std::size_t>(policy.obsolete_after_failures)) return CardStatus::Published;
  const auto span = history.back().at - history[history.size() - streak].at;
  return span >= policy.obsolete_after_span ? CardStatus::Obsolete : CardStatus::Published;
}

nlohmann::json sweep_to_json(const SweepReport& r) {
  json obsolete = json::array();
  for (const auto& a : r.newly_obsolete) obsolete.push_back(a.str());
  json restored = json::array();
  for (const auto& a : r.restored) restored.push_back(a.str());
  return {{"started", format_timestamp(r.started)},
          {"finished", format_timestamp(r.finished)},
          {"probed", r.probed},
          {"alive", r.alive},
          {"broken", r.broken},
          {"unreachable", r.unreachable},
          {"skipped", r.skipped},
          {"newly_obsolete", obsolete},
          {"restored", restored}};
}

LinkChecker::LinkChecker(Registry& registry, std::shared_ptr<Transport> transport, LinkPolicy policy, Clock clock)
    : registry_(registry),
      transport_(std::move(transport)),
      policy_(std::move(policy)),
      clock_(std::move(clock)),
      gate_(policy_.host_spacing) {}

bool LinkChecker::host_allowed(const std::string& host) const {
  if (policy_.deny_hosts.count(host)) return false;
  return policy_.allow_hosts.empty() || policy_.allow_hosts.count(host) > 0;
}

SweepReport LinkChecker::run_sweep() {
  SweepReport report;
  report.started = clock_();

  // One queue per origin; a worker drains a whole queue, so per-host
  // concurrency stays at one even before the gate.
  std::map<std::string, std::vector<std::pair<Accession, std::string>>> by_origin;
  for (const auto& card : registry_.cards()) {
    if (card.status == CardStatus::Draft) continue;
    const auto parts = split_url(card.homepage_url);
    if (parts && !host_allowed(parts->host)) {
      ++report.skipped;
      continue;
    }
    by_origin[parts ? parts->origin() : std::string()].emplace_back(card.accession, card.homepage_url);
  }
  std::vector<const std::vector<std::pair<Accession, std::string>>*> queues;
  for (const auto& [origin, q] : by_origin) queues.push_back(&q);

  std::mutex report_mutex;
  std::atomic<std::size_t> next{0};
  auto classify = [this](const std::vector<LinkProbe>& h) { return classify_obsolete(h, policy_); };
  std::exception_ptr failure;
  auto drain = [&] {
    for (std::size_t i = next++; i < queues.size(); i = next++) {
      for (const auto& [accession, url] : *queues[i]) {
        const auto probe = check_url(url, policy_, *transport_, clock_(), &gate_);
        const auto changed = registry_.record_probe(accession, probe, classify);
        std::lock_guard lock(report_mutex);
        ++report.probed;
        if (probe.outcome == LinkOutcome::Alive) ++report.alive;
        if (probe.outcome == LinkOutcome::Broken) ++report.broken;
        if (probe.outcome == LinkOutcome::Unreachable) ++report.unreachable;
        if (changed == CardStatus::Obsolete) report.newly_obsolete.push_back(accession);
        if (changed == CardStatus::Published) report.restored.push_back(accession);
      }
    }
  };
  auto worker = [&] {
    try {
      drain();
    } catch (...) {
      std::lock_guard lock(report_mutex);
      if (!failure) failure = std::current_exception();
      next = queues.size();
    }
  };
  const auto threads = std::min(policy_.parallelism, queues.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::sort(report.newly_obsolete.begin(), report.newly_obsolete.end());
  std::sort(report.restored.begin(), report.restored.end());
  report.finished = clock_();
  return report;
}

}  // namespace toolseek
