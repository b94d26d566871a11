#include <thread>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "edbench/errors.h"
#include "edbench/gateway.h"
#include "edbench/replay_store.h"
#include "test_support.h"

namespace edbench {
namespace {

LlmExchange exchange(std::string fp, std::string model, std::string raw) {
  LlmExchange e;
  e.prompt_fingerprint = std::move(fp);
  e.model = std::move(model);
  e.raw_response = std::move(raw);
  e.latency_s = 1.25;
  e.recorded_at = "2025-01-01T00:00:00Z";
  e.transport_meta["attempts"] = "1";
  return e;
}

TEST(LlmExchange, JsonRoundTrip) {
  const auto e = exchange("abc", "O1", "PG = [1, 2]\n\"quoted\"");
  const nlohmann::json j = e;
  EXPECT_EQ(j.at("fingerprint"), "abc");
  const auto back = j.get<LlmExchange>();
  EXPECT_EQ(back.raw_response, e.raw_response);
  EXPECT_EQ(back.latency_s, e.latency_s);
  EXPECT_EQ(back.transport_meta, e.transport_meta);
}

TEST(ReplayStore, AppendThenReloadLastWins) {
  testing::TempDir dir;
  const auto path = dir / "store.jsonl";
  {
    ReplayStore store(path, ReplayStore::Mode::kAppend);
    store.put(exchange("fp1", "O1", "first"));
    store.put(exchange("fp1", "O3-mini", "other model"));
    store.put(exchange("fp1", "O1", "second"));
    EXPECT_EQ(store.size(), 2u);
    EXPECT_EQ(store.get("fp1", "O1")->raw_response, "second");
  }
  const ReplayStore store(path, ReplayStore::Mode::kRead);
  EXPECT_EQ(store.size(), 2u);
  EXPECT_EQ(store.get("fp1", "O1")->raw_response, "second");
  EXPECT_EQ(store.get("fp1", "O3-mini")->raw_response, "other model");
  EXPECT_FALSE(store.get("fp2", "O1"));
  EXPECT_FALSE(store.get("fp1", "DeepSeek R1"));
  EXPECT_TRUE(store.warnings().empty());
}

TEST(ReplayStore, SkipsCorruptLines) {
  testing::TempDir dir;
  const auto path = dir / "store.jsonl";
  const std::string good = nlohmann::json(exchange("fp", "m", "ok")).dump();
  testing::write_file(path, good + "\n{not json\n\n{\"model\": \"m\"}\n");
  const ReplayStore store(path, ReplayStore::Mode::kRead);
  EXPECT_EQ(store.size(), 1u);
  EXPECT_EQ(store.get("fp", "m")->raw_response, "ok");
  ASSERT_EQ(store.warnings().size(), 2u);
  EXPECT_NE(store.warnings()[0].find(":2:"), std::string::npos) << store.warnings()[0];
  EXPECT_NE(store.warnings()[1].find(":4:"), std::string::npos) << store.warnings()[1];
}

TEST(ReplayStore, ModeErrors) {
  testing::TempDir dir;
  try {
    ReplayStore missing(dir / "nope.jsonl", ReplayStore::Mode::kRead);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("nope.jsonl"), std::string::npos);
  }
  { ReplayStore create(dir / "new.jsonl", ReplayStore::Mode::kAppend); }
  ReplayStore ro(dir / "new.jsonl", ReplayStore::Mode::kRead);
  EXPECT_THROW(ro.put(exchange("a", "b", "c")), IoError);
  testing::write_file(dir / "plain_file", "x");
  EXPECT_THROW(ReplayStore(dir / "plain_file" / "x.jsonl", ReplayStore::Mode::kAppend), IoError);
  // Missing parent directories are created for a new recording.
  ReplayStore nested(dir / "a" / "b" / "x.jsonl", ReplayStore::Mode::kAppend);
  EXPECT_TRUE(std::filesystem::exists(dir / "a" / "b" / "x.jsonl"));
}

TEST(ReplayStore, ConcurrentAppendsAndReads) {
  testing::TempDir dir;
  const auto path = dir / "store.jsonl";
  {
    ReplayStore store(path, ReplayStore::Mode::kAppend);
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
      threads.emplace_back([&, t] {
        for (int k = 0; k < 50; ++k) {
          const std::string fp = std::to_string(t) + "-" + std::to_string(k);
          store.put(exchange(fp, "m", fp));
          EXPECT_TRUE(store.get(fp, "m"));
        }
      });
    }
    for (auto& th : threads) th.join();
    EXPECT_EQ(store.size(), 200u);
  }
  const ReplayStore reread(path, ReplayStore::Mode::kRead);
  EXPECT_EQ(reread.size(), 200u);
  EXPECT_TRUE(reread.warnings().empty());
}

TEST(ReplayBackend, ServesAndMisses) {
  testing::TempDir dir;
  const auto path = dir / "store.jsonl";
  {
    ReplayStore w(path, ReplayStore::Mode::kAppend);
    w.put(exchange("fp", "O1", "PG = [1]"));
  }
  const ReplayStore store(path, ReplayStore::Mode::kRead);
  ReplayBackend backend(store);
  PromptBundle bundle;
  bundle.fingerprint = "fp";
  ModelTarget target;
  target.name = "O1";
  EXPECT_EQ(backend.complete(bundle, target).raw_response, "PG = [1]");
  target.name = "O3-mini";
  try {
    backend.complete(bundle, target);
    FAIL();
  } catch (const FixtureMissError& e) {
    EXPECT_NE(std::string(e.what()).find("O3-mini"), std::string::npos);
  }
}

}  // namespace
}  // namespace edbench
