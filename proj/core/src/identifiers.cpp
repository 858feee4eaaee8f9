#include "toolseek/identifiers.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "httplib.h"
#include "json.hpp"
#include "toolseek/error.hpp"

namespace toolseek {

namespace {

std::string format_accession(std::uint32_t number) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "TOOL_%06u", number);
  return buf;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

Accession::Accession(std::uint32_t number) : number_(number), text_(format_accession(number)) {
  if (number == 0 || number > kMaxNumber) {
    throw Error(ErrorCode::ValidationFailed, "accession number out of range: " + std::to_string(number));
  }
}

std::optional<Accession> Accession::try_parse(std::string_view text) {
  if (text.size() != 11 || text.substr(0, 5) != "TOOL_") return std::nullopt;
  std::uint32_t n = 0;
  for (char c : text.substr(5)) {
    if (!is_digit(c)) return std::nullopt;
    n = n * 10 + static_cast<std::uint32_t>(c - '0');
  }
  if (n == 0) return std::nullopt;
  return Accession(n);
}

Accession Accession::parse(std::string_view text) {
  auto parsed = try_parse(text);
  if (!parsed) throw Error(ErrorCode::ValidationFailed, "malformed accession '" + std::string(text) + "'", "accession");
  return *parsed;
}

AccessionAllocator::AccessionAllocator(std::filesystem::path counter_file)
    : counter_file_(std::move(counter_file)) {
  std::ifstream in(*counter_file_);
  std::uint32_t value = 0;
  if (in >> value) last_ = value;
}

Accession AccessionAllocator::next() {
  std::lock_guard lock(mutex_);
  if (last_ >= Accession::kMaxNumber) {
    throw Error(ErrorCode::ExhaustedSpace, "accession space exhausted");
  }
  const std::uint32_t value = last_ + 1;
  persist(value);
  last_ = value;
  return Accession(value);
}

std::uint32_t AccessionAllocator::last_issued() const {
  std::lock_guard lock(mutex_);
  return last_;
}

void AccessionAllocator::observe(const Accession& existing) {
  std::lock_guard lock(mutex_);
  if (existing.number() > last_) {
    persist(existing.number());
    last_ = existing.number();
  }
}

void AccessionAllocator::persist(std::uint32_t value) const {
  if (!counter_file_) return;
  auto tmp = *counter_file_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << value << '\n';
    if (!out.flush()) throw Error(ErrorCode::StorageFailure, "cannot write accession counter");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, *counter_file_, ec);
  if (ec) throw Error(ErrorCode::StorageFailure, "cannot commit accession counter: " + ec.message());
}

bool validate_doi(std::string_view text) {
  if (text.size() < 3 || text.substr(0, 3) != "10.") return false;
  std::size_t i = 3;
  while (i < text.size() && is_digit(text[i])) ++i;
  const std::size_t digits = i - 3;
  if (digits < 4 || digits > 9) return false;
  if (i >= text.size() || text[i] != '/') return false;
  ++i;
  if (i >= text.size()) return false;
  for (; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c <= 0x20 || c == 0x7F) return false;
  }
  return true;
}

Doi::Doi(std::string value) : value_(std::move(value)) {
  if (!validate_doi(value_)) throw Error(ErrorCode::ValidationFailed, "invalid DOI '" + value_ + "'", "doi");
}

std::string sanitize_version_label(std::string_view label) {
  std::string out;
  for (char c : label) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || is_digit(c) || c == '.';
    if (keep) {
      out.push_back(c);
    } else if (!out.empty() && out.back() != '-') {
      out.push_back('-');
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  if (out.empty()) {
    throw Error(ErrorCode::InvalidVersionLabel, "version label '" + std::string(label) + "' is empty after sanitization",
                "version_label");
  }
  return out;
}

Doi MockMintingClient::mint(const MintRequest& request) {
  return Doi(std::string(kPrefix) + "/toolseek." + request.accession.str() + "." +
             sanitize_version_label(request.version_label));
}

RemoteMintingClient::RemoteMintingClient(std::string base_url, std::string path,
                                         std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), path_(std::move(path)), timeout_(timeout) {}

Doi RemoteMintingClient::mint(const MintRequest& request) {
  const auto label = sanitize_version_label(request.version_label);
  std::lock_guard lock(mutex_);
  const auto key = std::make_pair(request.accession.number(), label);
  if (auto it = minted_.find(key); it != minted_.end()) return it->second;

  httplib::Client client(base_url_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  const nlohmann::json body = {{"accession", request.accession.str()},
                               {"version", request.version_label},
                               {"payload_digest", request.payload_digest}};
  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::MintingFailed, "registrar unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status != 200 && res->status != 201) {
    throw Error(ErrorCode::MintingFailed, "registrar answered HTTP " + std::to_string(res->status));
  }
  try {
    auto doc = nlohmann::json::parse(res->body);
    Doi doi(doc.at("doi").get<std::string>());
    minted_.emplace(key, doi);
    return doi;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MintingFailed, std::string("bad registrar reply: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::MintingFailed, std::string("registrar returned an invalid DOI: ") + e.what());
  }
}

Doi mint_doi(const Accession& accession, std::string_view version_label, MintingClient& client,
             std::string_view payload_digest) {
  return client.mint({accession, std::string(version_label), std::string(payload_digest)});
}

}  // namespace toolseek
