#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace toolseek {

// Deployment-local tool identifier, `TOOL_` + six zero-padded digits.
class Accession {
 public:
  static constexpr std::uint32_t kMaxNumber = 999999;

  Accession() = default;
  explicit Accession(std::uint32_t number);

  // Throws Error(ValidationFailed) unless `text` is a well-formed accession.
  static Accession parse(std::string_view text);
  static std::optional<Accession> try_parse(std::string_view text);

  std::uint32_t number() const noexcept { return number_; }
  const std::string& str() const noexcept { return text_; }

  auto operator<=>(const Accession& other) const { return number_ <=> other.number_; }
  bool operator==(const Accession& other) const { return number_ == other.number_; }

 private:
  std::uint32_t number_ = 0;
  std::string text_;
};

// Hands out strictly increasing accessions. With a counter file the last
// issued number is persisted before it is returned, so a restart never
// reissues one.
class AccessionAllocator {
 public:
  AccessionAllocator() = default;
  explicit AccessionAllocator(std::filesystem::path counter_file);

  // Throws Error(ExhaustedSpace) past TOOL_999999.
  Accession next();
  std::uint32_t last_issued() const;
  // Raises the floor, e.g. after loading existing cards.
  void observe(const Accession& existing);

 private:
  void persist(std::uint32_t value) const;

  mutable std::mutex mutex_;
  std::optional<std::filesystem::path> counter_file_;
  std::uint32_t last_ = 0;
};

// True iff `text` is `10.` + 4-9 digits + `/` + a non-empty visible suffix.
bool validate_doi(std::string_view text);

class Doi {
 public:
  // Throws Error(ValidationFailed) when the pattern does not match.
  explicit Doi(std::string value);
  const std::string& str() const noexcept { return value_; }
  auto operator<=>(const Doi&) const = default;

 private:
  std::string value_;
};

// Keeps [A-Za-z0-9.], turns every other run into '-', trims '-'.
// Throws Error(InvalidVersionLabel) when nothing is left.
std::string sanitize_version_label(std::string_view label);

struct MintRequest {
  Accession accession;
  std::string version_label;
  std::string payload_digest;
};

class MintingClient {
 public:
  virtual ~MintingClient() = default;
  // Idempotent per (accession, version_label). Throws Error(MintingFailed).
  virtual Doi mint(const MintRequest& request) = 0;
};

// Offline minter under the 10.5072 test prefix:
// 10.5072/toolseek.<accession>.<sanitized version label>
class MockMintingClient : public MintingClient {
 public:
  static constexpr std::string_view kPrefix = "10.5072";
  Doi mint(const MintRequest& request) override;
};

// Registrar contract over HTTP: POST <path> with a JSON body
// {"accession", "version", "payload_digest"}; a 200/201 reply carries {"doi"}.
class RemoteMintingClient : public MintingClient {
 public:
  RemoteMintingClient(std::string base_url, std::string path = "/identifiers",
                      std::chrono::milliseconds timeout = std::chrono::seconds(10));
  Doi mint(const MintRequest& request) override;

 private:
  std::string base_url_;
  std::string path_;
  std::chrono::milliseconds timeout_;
  std::mutex mutex_;
  std::map<std::pair<std::uint32_t, std::string>, Doi> minted_;
};

Doi mint_doi(const Accession& accession, std::string_view version_label, MintingClient& client,
             std::string_view payload_digest = {});

}  // namespace toolseek
