#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "fixtures.hpp"
#include "json.hpp"

namespace toolseek {
namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  std::vector<std::string> with_store(std::vector<std::string> args) {
    args.insert(args.begin(), {"--store", store().string(), "--terminology", terms});
    return args;
  }
  std::filesystem::path store() const { return dir.path() / "store"; }
  void ingest() { ASSERT_EQ(cli_run(with_store({"ingest", tools})).code, 0); }

  testing::TempDir dir;
  std::string terms = testing::fixture_path("f1_terminology.json").string();
  std::string tools = testing::fixture_path("f1_tools.jsonl").string();
};

TEST_F(Cli, IngestReportsAndExitCodes) {
  auto r = cli_run(with_store({"ingest", tools}));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("accepted 4"), std::string::npos);
  // Same names again: every record is a duplicate.
  r = cli_run(with_store({"ingest", tools}));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("rejected 4"), std::string::npos);
  EXPECT_NE(r.out.find("DuplicateName"), std::string::npos);
  EXPECT_EQ(cli_run(with_store({"ingest", (dir.path() / "none.jsonl").string()})).code, 1);
}

TEST_F(Cli, SearchTableAndJson) {
  ingest();
  auto r = cli_run(with_store({"search", "QC tools for sequencing"}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("qcheck"), std::string::npos);
  EXPECT_NE(r.out.find("3 hit(s)"), std::string::npos);

  r = cli_run(with_store({"search", "--os", "Windows", "--json"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["total_hits"], 1);
  EXPECT_EQ(doc["results"][0]["name"], "qcheck");

  r = cli_run(with_store({"search", "alignment AND"}));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("position 13"), std::string::npos);
}

TEST_F(Cli, IndexBuildGenerationsIncrease) {
  ingest();
  auto r = cli_run(with_store({"index", "build"}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("generation 1"), std::string::npos);
  EXPECT_NE(r.out.find("documents 4"), std::string::npos);
  r = cli_run(with_store({"index", "build"}));
  EXPECT_NE(r.out.find("generation 2"), std::string::npos);
}

TEST_F(Cli, LinkcheckWithStub) {
  ingest();
  const auto stub = dir.path() / "stub.json";
  std::ofstream(stub) << R"({"http://www.htslib.org/": 200, "https://qcheck.example.org/": 404,
    "https://deseeker.example.org/": {"status": 301, "location": "https://deseeker.example.org/home"},
    "https://deseeker.example.org/home": 200})";
  const auto r = cli_run(with_store({"linkcheck", "run", "--stub", stub.string()}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["probed"], 4);
  EXPECT_EQ(doc["alive"], 2);
  EXPECT_EQ(doc["broken"], 1);
  EXPECT_EQ(doc["unreachable"], 1);
}

TEST_F(Cli, ConfigSuppliesPaths) {
  std::filesystem::create_directories(store());
  const auto cfg = dir.path() / "config.json";
  std::ofstream(cfg) << nlohmann::json{{"store_path", "store"}, {"terminology_path", terms}}.dump();
  EXPECT_EQ(cli_run({"--config", cfg.string(), "ingest", tools}).code, 0);
  EXPECT_EQ(cli_run({"search", "SAMtools", "--config", cfg.string()}).code, 0);
}

TEST(CliStandalone, UsageAndUtilities) {
  EXPECT_EQ(cli_run({}).code, 2);
  EXPECT_EQ(cli_run({"frobnicate"}).code, 2);
  EXPECT_EQ(cli_run({"--help"}).code, 0);
  EXPECT_EQ(cli_run({"search", "x"}).code, 2);  // no store

  auto r = cli_run({"doi", "validate", "10.1093/bioinformatics/btr509"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "true\n");
  EXPECT_EQ(cli_run({"doi", "validate", "10.12/x"}).out, "false\n");

  r = cli_run({"terminology", "check", testing::fixture_path("f1_terminology.json").string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "ok\n");
  testing::TempDir dir;
  const auto bad = dir.path() / "bad.json";
  std::ofstream(bad) << R"({"categories":[{"category_id":"A.B","label":"x","level":2,"parent_id":"A","omics_field":"genomics"}],"concepts":[]})";
  r = cli_run({"terminology", "check", bad.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("A.B"), std::string::npos);
}

}  // namespace
}  // namespace toolseek
