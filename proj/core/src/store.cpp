#include "toolseek/store.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"
#include "toolseek/error.hpp"

namespace toolseek {

namespace fs = std::filesystem;

namespace {

constexpr int kStoreFormat = 1;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out.flush()) throw Error(ErrorCode::StorageFailure, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::StorageFailure, "cannot commit " + path.string() + ": " + ec.message());
}

// File names keep [A-Za-z0-9._-] and percent-encode the rest.
std::string encode_key(std::string_view key) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (char c : key) {
    const auto u = static_cast<unsigned char>(c);
    const bool plain = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                       c == '_' || c == '-';
    if (plain) {
      out.push_back(c);
    } else {
      out.push_back('%');
      out.push_back(kHex[u >> 4]);
      out.push_back(kHex[u & 0xF]);
    }
  }
  return out;
}

std::string decode_key(std::string_view name) {
  std::string out;
  for (std::size_t i = 0; i < name.size(); ++i) {
    if (name[i] == '%' && i + 2 < name.size()) {
      out.push_back(static_cast<char>(std::stoi(std::string(name.substr(i + 1, 2)), nullptr, 16)));
      i += 2;
    } else {
      out.push_back(name[i]);
    }
  }
  return out;
}

void check_name(std::string_view name) {
  if (name.empty() || name.find('/') != std::string_view::npos || name.find("..") != std::string_view::npos) {
    throw Error(ErrorCode::StorageFailure, "invalid store name '" + std::string(name) + "'");
  }
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::StorageFailure, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

void MemoryStore::put(std::string_view collection, std::string_view key, const std::string& document) {
  std::lock_guard lock(mutex_);
  collections_[std::string(collection)][std::string(key)] = document;
}

std::optional<std::string> MemoryStore::get(std::string_view collection, std::string_view key) const {
  std::lock_guard lock(mutex_);
  auto c = collections_.find(collection);
  if (c == collections_.end()) return std::nullopt;
  auto d = c->second.find(std::string(key));
  if (d == c->second.end()) return std::nullopt;
  return d->second;
}

std::vector<std::pair<std::string, std::string>> MemoryStore::list(std::string_view collection) const {
  std::lock_guard lock(mutex_);
  auto c = collections_.find(collection);
  if (c == collections_.end()) return {};
  return {c->second.begin(), c->second.end()};
}

void MemoryStore::append_log(std::string_view log, const std::string& line) {
  std::lock_guard lock(mutex_);
  logs_[std::string(log)].push_back(line);
}

std::vector<std::string> MemoryStore::read_log(std::string_view log) const {
  std::lock_guard lock(mutex_);
  auto it = logs_.find(log);
  return it == logs_.end() ? std::vector<std::string>{} : it->second;
}

std::string MemoryStore::put_blob(std::string_view bytes) {
  auto digest = sha256_hex(bytes);
  std::lock_guard lock(mutex_);
  blobs_.emplace(digest, std::string(bytes));
  return digest;
}

std::optional<std::string> MemoryStore::get_blob(std::string_view digest) const {
  std::lock_guard lock(mutex_);
  auto it = blobs_.find(digest);
  if (it == blobs_.end()) return std::nullopt;
  return it->second;
}

FileStore::FileStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / "blobs", ec);
  if (ec) throw Error(ErrorCode::StorageFailure, "cannot create store at " + root_.string() + ": " + ec.message());
  const auto header = root_ / "store.json";
  if (fs::exists(header)) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_file(header));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::StorageFailure, "corrupt store header: " + std::string(e.what()));
    }
    if (doc.value("digest_algorithm", "") != digest_algorithm()) {
      throw Error(ErrorCode::StorageFailure, "store uses digest '" + doc.value("digest_algorithm", "") +
                                                 "', expected '" + digest_algorithm() + "'");
    }
  } else {
    const nlohmann::json doc = {{"format", kStoreFormat}, {"digest_algorithm", digest_algorithm()}};
    write_file_atomic(header, doc.dump(2) + "\n");
  }
}

fs::path FileStore::document_path(std::string_view collection, std::string_view key) const {
  check_name(collection);
  return root_ / std::string(collection) / (encode_key(key) + ".json");
}

void FileStore::put(std::string_view collection, std::string_view key, const std::string& document) {
  std::lock_guard lock(mutex_);
  const auto path = document_path(collection, key);
  fs::create_directories(path.parent_path());
  write_file_atomic(path, document);
}

std::optional<std::string> FileStore::get(std::string_view collection, std::string_view key) const {
  std::lock_guard lock(mutex_);
  const auto path = document_path(collection, key);
  if (!fs::exists(path)) return std::nullopt;
  return read_file(path);
}

std::vector<std::pair<std::string, std::string>> FileStore::list(std::string_view collection) const {
  std::lock_guard lock(mutex_);
  check_name(collection);
  const auto dir = root_ / std::string(collection);
  std::map<std::string, std::string> docs;
  if (!fs::is_directory(dir)) return {};
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    docs.emplace(decode_key(entry.path().stem().string()), read_file(entry.path()));
  }
  return {docs.begin(), docs.end()};
}

void FileStore::append_log(std::string_view log, const std::string& line) {
  std::lock_guard lock(mutex_);
  check_name(log);
  std::ofstream out(root_ / (std::string(log) + ".log"), std::ios::binary | std::ios::app);
  out << line << '\n';
  if (!out.flush()) throw Error(ErrorCode::StorageFailure, "cannot append to log " + std::string(log));
}

std::vector<std::string> FileStore::read_log(std::string_view log) const {
  std::lock_guard lock(mutex_);
  check_name(log);
  std::vector<std::string> lines;
  std::ifstream in(root_ / (std::string(log) + ".log"), std::ios::binary);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::string FileStore::put_blob(std::string_view bytes) {
  auto digest = sha256_hex(bytes);
  std::lock_guard lock(mutex_);
  const auto path = root_ / "blobs" / digest;
  if (!fs::exists(path)) write_file_atomic(path, bytes);
  return digest;
}

std::optional<std::string> FileStore::get_blob(std::string_view digest) const {
  std::lock_guard lock(mutex_);
  check_name(digest);
  const auto path = root_ / "blobs" / std::string(digest);
  if (!fs::exists(path)) return std::nullopt;
  return read_file(path);
}

std::optional<fs::path> FileStore::accession_counter_path() const { return root_ / "accession.counter"; }

}  // namespace toolseek
