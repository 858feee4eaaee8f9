#include "fixtures.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace toolseek::testing {

std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(TOOLSEEK_FIXTURE_DIR) / name;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::shared_ptr<const TerminologyGraph> f1_graph() {
  static const auto graph =
      std::make_shared<const TerminologyGraph>(load_terminology_file(fixture_path("f1_terminology.json").string()));
  return graph;
}

TempDir::TempDir() {
  std::random_device rd;
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto p = std::filesystem::temp_directory_path() / ("toolseek-test-" + std::to_string(rd()));
    if (std::filesystem::create_directory(p)) {
      path_ = p;
      return;
    }
  }
  throw std::runtime_error("cannot create temp dir");
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

F1::F1(bool with_reviews, std::shared_ptr<DocumentStore> store) {
  if (!store) store = std::make_shared<MemoryStore>();
  catalog = std::make_unique<Catalog>(f1_graph(), store, std::make_shared<MockMintingClient>(), clock.clock());
  std::istringstream tools(read_file(fixture_path("f1_tools.jsonl")));
  auto report = catalog->registry().ingest_records(tools);
  if (report.accepted != 4) throw std::runtime_error("F1 ingest rejected records");
  for (const auto& a : report.accessions) acc.emplace(catalog->registry().get_tool(a).name, a);
  if (!with_reviews) return;
  const auto reviews = nlohmann::json::parse(read_file(fixture_path("f1_reviews.json")));
  for (const auto& r : reviews) {
    const auto user = r.at("user").get<std::string>();
    if (!catalog->community().find_user(user)) catalog->community().register_user(User{user, user});
    catalog->community().add_review(user, acc.at(r.at("tool").get<std::string>()), r.at("rating").get<int>(),
                                    r.at("text").get<std::string>());
  }
}

}  // namespace toolseek::testing
