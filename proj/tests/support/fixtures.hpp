#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "toolseek/catalog.hpp"
#include "toolseek/terminology.hpp"
#include "toolseek/time.hpp"

namespace toolseek::testing {

std::filesystem::path fixture_path(const std::string& name);
std::string read_file(const std::filesystem::path& path);

// Manually advanced clock, safe to read from worker threads.
class SimClock {
 public:
  explicit SimClock(Timestamp start = parse_timestamp("2016-10-18T14:57:00Z")) : now_(start.time_since_epoch().count()) {}

  Timestamp now() const { return Timestamp(std::chrono::seconds(now_.load())); }
  void advance(std::chrono::seconds by) { now_ += by.count(); }
  Clock clock() const {
    return [this] { return now(); };
  }

 private:
  std::atomic<long long> now_;
};

std::shared_ptr<const TerminologyGraph> f1_graph();

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// The four-tool desk catalog with its five reviews, in memory.
struct F1 {
  SimClock clock;
  std::unique_ptr<Catalog> catalog;
  std::map<std::string, Accession> acc;  // tool name -> accession

  explicit F1(bool with_reviews = true, std::shared_ptr<DocumentStore> store = nullptr);
  const Accession& operator[](const std::string& name) const { return acc.at(name); }
};

}  // namespace toolseek::testing
