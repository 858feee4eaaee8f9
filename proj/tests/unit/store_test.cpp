#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "toolseek/store.hpp"

namespace toolseek {
namespace {

template <class Make>
void exercise(Make make) {
  auto store = make();
  store->put("cards", "TOOL_000002", "{\"b\":2}");
  store->put("cards", "TOOL_000001", "{\"a\":1}");
  store->put("cards", "TOOL_000001", "{\"a\":3}");
  EXPECT_EQ(store->get("cards", "TOOL_000001"), "{\"a\":3}");
  EXPECT_FALSE(store->get("cards", "TOOL_000009"));
  const auto all = store->list("cards");
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].first, "TOOL_000001");
  EXPECT_TRUE(store->list("nothing").empty());

  store->append_log("audit", "one");
  store->append_log("audit", "two");
  EXPECT_EQ(store->read_log("audit"), (std::vector<std::string>{"one", "two"}));

  const auto digest = store->put_blob("payload bytes");
  EXPECT_EQ(digest, sha256_hex("payload bytes"));
  EXPECT_EQ(store->get_blob(digest), "payload bytes");
  EXPECT_FALSE(store->get_blob(sha256_hex("other")));
}

TEST(Sha256, KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(MemoryStore, Contract) {
  exercise([] { return std::make_shared<MemoryStore>(); });
}

TEST(FileStore, Contract) {
  testing::TempDir dir;
  exercise([&] { return std::make_shared<FileStore>(dir.path() / "store"); });
}

TEST(FileStore, PersistsAcrossInstancesAndRecordsDigest) {
  testing::TempDir dir;
  {
    FileStore s(dir.path());
    s.put("users", "u1", "{}");
    s.append_log("audit", "{\"x\":1}");
  }
  FileStore again(dir.path());
  EXPECT_EQ(again.get("users", "u1"), "{}");
  EXPECT_EQ(again.read_log("audit").size(), 1u);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "store.json"));
  EXPECT_NE(testing::read_file(dir.path() / "store.json").find("sha256"), std::string::npos);
  EXPECT_TRUE(again.accession_counter_path().has_value());
}

TEST(FileStore, KeysWithSeparatorsStayDistinct) {
  testing::TempDir dir;
  FileStore s(dir.path());
  s.put("collections", "u1|fav/x", "a");
  s.put("collections", "u1|fav_x", "b");
  EXPECT_EQ(s.get("collections", "u1|fav/x"), "a");
  EXPECT_EQ(s.get("collections", "u1|fav_x"), "b");
  EXPECT_EQ(s.list("collections").size(), 2u);
}

}  // namespace
}  // namespace toolseek
