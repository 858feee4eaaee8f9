#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "json.hpp"
#include "toolseek/catalog.hpp"
#include "toolseek/error.hpp"
#include "toolseek/linkcheck.hpp"
#include "toolseek/ranking.hpp"

namespace httplib {
class Server;
}

namespace toolseek {

struct ApiConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  RankWeights rank_weights;
  LinkPolicy linkcheck;
  // URL map file; when set, sweeps never leave the process.
  std::optional<std::filesystem::path> linkcheck_stub;
  std::chrono::seconds linkcheck_interval{0};  // 0 disables scheduled sweeps
  std::filesystem::path store_path;
  std::filesystem::path terminology_path;
  std::size_t default_per_page = 20;
  std::size_t max_per_page = kMaxPerPage;
  std::size_t max_upload_bytes = 16 * 1024 * 1024;
  std::optional<std::string> minting_endpoint;  // mock minter when unset
};

// Relative paths resolve against `base_dir`. Throws Error(ValidationFailed)
// for unknown keys, missing paths or bad limits; Error(InvalidWeights).
ApiConfig parse_api_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ApiConfig load_api_config(const std::filesystem::path& file);

struct ErrorMapping {
  ErrorCode code;
  int status;
  std::string_view name;
};

// One row per ErrorCode.
const std::vector<ErrorMapping>& error_table();
const ErrorMapping& map_error(ErrorCode code);
nlohmann::json error_body(const Error& error);

// Canonical wire encoding: sorted keys, compact, trailing newline.
std::string wire(const nlohmann::json& body);

using QueryParams = std::multimap<std::string, std::string>;

// Throws Error(PageOutOfRange), Error(BadFacetValue).
SearchRequest search_request_from_params(const QueryParams& params, const ApiConfig& config);

struct Caller {
  UserId user_id;
  Role role = Role::Member;
};

// X-User / X-Role. Throws Error(MissingField) when X-User is absent and
// Error(ValidationFailed) for an unknown role.
Caller caller_from_headers(const std::optional<std::string>& user, const std::optional<std::string>& role);

inline constexpr std::string_view kGenerationHeader = "X-Generation";
inline constexpr std::string_view kElapsedHeader = "X-Elapsed-Us";

class Service {
 public:
  Service(Catalog& catalog, ApiConfig config, std::shared_ptr<Transport> linkcheck_transport = nullptr);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds config.host; port 0 picks a free port. Returns the bound port.
  int bind(int port);
  // Serves on a background thread after bind().
  void start();
  // Binds and serves on the calling thread until stop().
  bool listen();
  void stop();

  const ApiConfig& config() const { return config_; }
  LinkChecker& link_checker() { return *checker_; }

 private:
  void install_routes();
  void schedule_sweeps();

  Catalog& catalog_;
  ApiConfig config_;
  std::unique_ptr<LinkChecker> checker_;
  std::mutex sweep_mutex_;
  std::unique_ptr<httplib::Server> server_;
  std::thread server_thread_;
  std::thread sweep_thread_;
  std::mutex stop_mutex_;
  std::condition_variable stop_cv_;
  bool stopping_ = false;
};

}  // namespace toolseek
