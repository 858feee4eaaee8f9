#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace toolseek {

// Hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

// Keyed documents grouped in collections, append-only logs, and
// content-addressed blobs. Implementations must make each call atomic.
class DocumentStore {
 public:
  virtual ~DocumentStore() = default;

  virtual void put(std::string_view collection, std::string_view key, const std::string& document) = 0;
  virtual std::optional<std::string> get(std::string_view collection, std::string_view key) const = 0;
  // All documents of a collection ordered by key.
  virtual std::vector<std::pair<std::string, std::string>> list(std::string_view collection) const = 0;

  virtual void append_log(std::string_view log, const std::string& line) = 0;
  virtual std::vector<std::string> read_log(std::string_view log) const = 0;

  // Stores bytes under their digest and returns the digest.
  virtual std::string put_blob(std::string_view bytes) = 0;
  virtual std::optional<std::string> get_blob(std::string_view digest) const = 0;

  // Fixed per deployment; recorded in the store header when persistent.
  virtual std::string digest_algorithm() const { return "sha256"; }
  // Where the accession counter lives, if anywhere.
  virtual std::optional<std::filesystem::path> accession_counter_path() const { return std::nullopt; }
};

class MemoryStore : public DocumentStore {
 public:
  void put(std::string_view collection, std::string_view key, const std::string& document) override;
  std::optional<std::string> get(std::string_view collection, std::string_view key) const override;
  std::vector<std::pair<std::string, std::string>> list(std::string_view collection) const override;
  void append_log(std::string_view log, const std::string& line) override;
  std::vector<std::string> read_log(std::string_view log) const override;
  std::string put_blob(std::string_view bytes) override;
  std::optional<std::string> get_blob(std::string_view digest) const override;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::map<std::string, std::string>, std::less<>> collections_;
  std::map<std::string, std::vector<std::string>, std::less<>> logs_;
  std::map<std::string, std::string, std::less<>> blobs_;
};

// One file per document under <root>/<collection>/, logs as <root>/<log>.log
// (one JSON line per entry), blobs under <root>/blobs/<digest>, and a header
// <root>/store.json naming the digest algorithm.
class FileStore : public DocumentStore {
 public:
  explicit FileStore(std::filesystem::path root);

  void put(std::string_view collection, std::string_view key, const std::string& document) override;
  std::optional<std::string> get(std::string_view collection, std::string_view key) const override;
  std::vector<std::pair<std::string, std::string>> list(std::string_view collection) const override;
  void append_log(std::string_view log, const std::string& line) override;
  std::vector<std::string> read_log(std::string_view log) const override;
  std::string put_blob(std::string_view bytes) override;
  std::optional<std::string> get_blob(std::string_view digest) const override;
  std::optional<std::filesystem::path> accession_counter_path() const override;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path document_path(std::string_view collection, std::string_view key) const;

  std::filesystem::path root_;
  mutable std::mutex mutex_;
};

}  // namespace toolseek
