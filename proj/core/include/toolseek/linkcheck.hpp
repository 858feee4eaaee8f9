#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "toolseek/model.hpp"
#include "toolseek/registry.hpp"
#include "toolseek/time.hpp"

namespace toolseek {

struct LinkPolicy {
  std::chrono::milliseconds timeout{10'000};  // connect and read, each
  int retries = 2;
  std::chrono::milliseconds backoff{1'000};  // doubles per retry
  int max_redirects = 5;
  std::chrono::milliseconds host_spacing{500};
  std::size_t parallelism = 8;
  int obsolete_after_failures = 3;
  std::chrono::seconds obsolete_after_span{std::chrono::hours(24 * 7)};
  std::string user_agent = "toolseek-linkcheck/0.1";
  std::set<std::string> allow_hosts;  // empty: every host allowed
  std::set<std::string> deny_hosts;
};

nlohmann::json policy_to_json(const LinkPolicy& p);
// Durations are given in milliseconds except obsolete_after_days.
LinkPolicy policy_from_json(const nlohmann::json& doc);

struct UrlParts {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string target;  // path plus query, at least "/"

  std::string origin() const;
};

std::optional<UrlParts> split_url(std::string_view url);
// Resolves a Location header against the URL that produced it.
std::string resolve_location(const UrlParts& base, std::string_view location);

struct HttpReply {
  int status = 0;
  std::optional<std::string> location;
};

// One HTTP exchange, without redirect handling. nullopt means the request
// never got a status line (DNS, refused, timeout).
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::optional<HttpReply> request(std::string_view method, const std::string& url,
                                           const LinkPolicy& policy) = 0;
};

class HttpTransport final : public Transport {
 public:
  std::optional<HttpReply> request(std::string_view method, const std::string& url,
                                   const LinkPolicy& policy) override;
};

// Canned replies keyed by URL; unknown URLs are unreachable. Backs the
// CLI stub mode.
class MapTransport final : public Transport {
 public:
  struct Call {
    std::string method;
    std::string url;
    std::chrono::steady_clock::time_point at;
  };

  void set(std::string url, std::optional<HttpReply> reply);
  std::optional<HttpReply> request(std::string_view method, const std::string& url,
                                   const LinkPolicy& policy) override;
  std::vector<Call> calls() const;

  // {"<url>": 200 | {"status": 301, "location": "..."} | "unreachable"}
  static std::shared_ptr<MapTransport> from_json(const nlohmann::json& doc);

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::optional<HttpReply>> replies_;
  std::vector<Call> calls_;
};

// Serializes requests per host and keeps them host_spacing apart, measured
// from the end of one exchange to the start of the next.
class HostGate {
 public:
  explicit HostGate(std::chrono::milliseconds spacing) : spacing_(spacing) {}

  template <class Fn>
  auto with(const std::string& host, Fn&& fn) {
    auto& slot = acquire(host);
    struct Release {
      HostGate* gate;
      Slot* slot;
      ~Release() { gate->release(*slot); }
    } release{this, &slot};
    return fn();
  }

 private:
  struct Slot {
    bool busy = false;
    std::optional<std::chrono::steady_clock::time_point> last_end;
  };

  Slot& acquire(const std::string& host);
  void release(Slot& slot);

  std::chrono::milliseconds spacing_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::map<std::string, Slot> slots_;
};

// HEAD, then GET on 405/501; manual redirects; retries with backoff on
// unreachable. Never throws for network failures.
LinkProbe check_url(const std::string& url, const LinkPolicy& policy, Transport& transport, Timestamp at,
                    HostGate* gate = nullptr);

// Obsolete iff the trailing run of non-alive probes has at least
// obsolete_after_failures entries spanning obsolete_after_span.
CardStatus classify_obsolete(const std::vector<LinkProbe>& history, const LinkPolicy& policy = {});

struct SweepReport {
  Timestamp started{};
  Timestamp finished{};
  std::size_t probed = 0;
  std::size_t alive = 0;
  std::size_t broken = 0;
  std::size_t unreachable = 0;
  std::size_t skipped = 0;  // host not allowed
  std::vector<Accession> newly_obsolete;
  std::vector<Accession> restored;
};

nlohmann::json sweep_to_json(const SweepReport& report);

class LinkChecker {
 public:
  LinkChecker(Registry& registry, std::shared_ptr<Transport> transport, LinkPolicy policy = {},
              Clock clock = system_now);

  // Probes every published or obsolete card once.
  SweepReport run_sweep();
  const LinkPolicy& policy() const { return policy_; }

 private:
  bool host_allowed(const std::string& host) const;

  Registry& registry_;
  std::shared_ptr<Transport> transport_;
  LinkPolicy policy_;
  Clock clock_;
  HostGate gate_;  // outlives sweeps so spacing holds across them
};

}  // namespace toolseek
