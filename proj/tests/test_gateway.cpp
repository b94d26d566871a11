#include <atomic>
#include <chrono>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "edbench/errors.h"
#include "edbench/gateway.h"
#include "test_support.h"

namespace edbench {
namespace {

using nlohmann::json;

// Local chat-completions stub. Handlers are swapped per test.
class StubServer {
 public:
  StubServer() {
    server_.Post(".*", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      const int now = ++in_flight_;
      {
        std::lock_guard lock(mu_);
        max_in_flight_ = std::max(max_in_flight_, now);
        last_auth_ = req.get_header_value("Authorization");
        last_path_ = req.path;
        last_body_ = req.body;
      }
      handler_(req, res);
      --in_flight_;
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  std::string url(const std::string& path = "/v1/chat/completions") const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }

  std::function<void(const httplib::Request&, httplib::Response&)> handler_ =
      [](const httplib::Request& req, httplib::Response& res) {
        const auto body = json::parse(req.body);
        res.set_content(reply(body.at("model").get<std::string>() + " saw " +
                              std::to_string(body.at("messages").at(0).at("content")
                                                 .get<std::string>().size()) +
                              " chars"),
                        "application/json");
      };

  static std::string reply(const std::string& content) {
    return json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
  }

  std::atomic<int> requests_{0};
  std::atomic<int> in_flight_{0};
  std::mutex mu_;
  int max_in_flight_ = 0;
  std::string last_auth_, last_path_, last_body_;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

PromptBundle bundle(const std::string& text = "hello prompt") {
  PromptBundle b;
  b.text = text;
  b.fingerprint = "fp-" + text;
  return b;
}

ModelTarget target(const StubServer& s, const std::string& env = "") {
  ModelTarget t;
  t.name = "O3-mini-high";
  t.model_id = "o3-mini";
  t.endpoint = s.url();
  t.credential_env = env;
  t.timeout_s = 5;
  return t;
}

struct Recorder {
  std::vector<double> sleeps;
  LiveOptions options() {
    LiveOptions o;
    o.sleep = [this](double s) { sleeps.push_back(s); };
    o.log = [](const std::string&) {};
    return o;
  }
};

TEST(ChatRequestBody, FieldsAndExtras) {
  ModelTarget t;
  t.name = "O3-mini-high";
  t.model_id = "o3-mini";
  t.max_tokens = 100;
  t.extra = {{"reasoning_effort", "high"}};
  const auto b = chat_request_body(bundle("x"), t);
  EXPECT_EQ(b.at("model"), "o3-mini");
  EXPECT_EQ(b.at("messages").size(), 1u);
  EXPECT_EQ(b.at("messages")[0].at("role"), "user");
  EXPECT_EQ(b.at("messages")[0].at("content"), "x");
  EXPECT_EQ(b.at("max_tokens"), 100);
  EXPECT_EQ(b.at("reasoning_effort"), "high");
  t.model_id.clear();
  t.max_tokens = 0;
  EXPECT_EQ(chat_request_body(bundle("x"), t).at("model"), "O3-mini-high");
  EXPECT_FALSE(chat_request_body(bundle("x"), t).contains("max_tokens"));
}

TEST(ChatResponseContent, Malformed) {
  EXPECT_EQ(chat_response_content(StubServer::reply("hi"), "m"), "hi");
  EXPECT_THROW(chat_response_content("not json", "m"), TransportError);
  EXPECT_THROW(chat_response_content(R"({"choices": []})", "m"), TransportError);
  EXPECT_THROW(chat_response_content(R"({"choices":[{"message":{"content":null}}]})", "m"),
               TransportError);
}

TEST(ModelTarget, JsonAndValidation) {
  const auto t = json{{"name", "O1"}, {"endpoint", "http://x"}, {"temperature", 0.5}}
                     .get<ModelTarget>();
  EXPECT_EQ(t.wire_model(), "O1");
  EXPECT_EQ(t.temperature, 0.5);
  EXPECT_EQ(json(t).get<ModelTarget>().endpoint, "http://x");
  ModelTarget bad;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad.name = "x";
  bad.timeout_s = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(LiveBackend, EchoWithBearerToken) {
  StubServer server;
  ::setenv("EDBENCH_TEST_TOKEN", "sekrit", 1);
  Recorder rec;
  LiveBackend backend(rec.options());
  const auto ex = backend.complete(bundle(), target(server, "EDBENCH_TEST_TOKEN"));
  EXPECT_EQ(ex.raw_response, "o3-mini saw 12 chars");
  EXPECT_EQ(ex.model, "O3-mini-high");
  EXPECT_EQ(ex.prompt_fingerprint, "fp-hello prompt");
  EXPECT_EQ(ex.transport_meta.at("attempts"), "1");
  EXPECT_EQ(ex.transport_meta.at("status"), "200");
  EXPECT_GE(ex.latency_s, 0.0);
  EXPECT_EQ(ex.recorded_at.size(), 20u);
  EXPECT_EQ(server.last_auth_, "Bearer sekrit");
  EXPECT_EQ(server.last_path_, "/v1/chat/completions");
}

TEST(LiveBackend, DefaultPathAndNoAuth) {
  StubServer server;
  Recorder rec;
  LiveBackend backend(rec.options());
  auto t = target(server);
  t.endpoint = server.url("");
  backend.complete(bundle(), t);
  EXPECT_EQ(server.last_path_, "/v1/chat/completions");
  EXPECT_EQ(server.last_auth_, "");
}

TEST(LiveBackend, MissingCredentialFailsBeforeRequest) {
  StubServer server;
  ::unsetenv("EDBENCH_TEST_UNSET");
  Recorder rec;
  LiveBackend backend(rec.options());
  EXPECT_THROW(backend.complete(bundle(), target(server, "EDBENCH_TEST_UNSET")), AuthError);
  EXPECT_EQ(server.requests_, 0);
}

TEST(LiveBackend, StatusMapping) {
  StubServer server;
  Recorder rec;
  LiveBackend backend(rec.options());
  int status = 0;
  server.handler_ = [&](const httplib::Request&, httplib::Response& res) {
    res.status = status;
    res.set_content("{\"error\":\"nope\"}", "application/json");
  };
  status = 401;
  EXPECT_THROW(backend.complete(bundle(), target(server)), AuthError);
  status = 403;
  EXPECT_THROW(backend.complete(bundle(), target(server)), AuthError);
  status = 504;
  EXPECT_THROW(backend.complete(bundle(), target(server)), TimeoutError);
  status = 500;
  try {
    backend.complete(bundle(), target(server));
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_EQ(e.model(), "O3-mini-high");
    EXPECT_NE(std::string(e.what()).find("HTTP 500"), std::string::npos);
  }
  EXPECT_TRUE(rec.sleeps.empty());  // nothing but 429 is retried
  EXPECT_EQ(server.requests_, 4);
}

TEST(LiveBackend, RateLimitBacksOffThenSucceeds) {
  StubServer server;
  std::atomic<int> calls{0};
  server.handler_ = [&](const httplib::Request&, httplib::Response& res) {
    if (++calls <= 2) {
      res.status = 429;
      if (calls == 2) res.set_header("Retry-After", "7");
      return;
    }
    res.set_content(StubServer::reply("PG = [1]"), "application/json");
  };
  Recorder rec;
  LiveBackend backend(rec.options());
  const auto ex = backend.complete(bundle(), target(server));
  EXPECT_EQ(ex.raw_response, "PG = [1]");
  EXPECT_EQ(ex.transport_meta.at("attempts"), "3");
  EXPECT_EQ(rec.sleeps, (std::vector<double>{2.0, 7.0}));
}

TEST(LiveBackend, RateLimitExhausted) {
  StubServer server;
  server.handler_ = [](const httplib::Request&, httplib::Response& res) { res.status = 429; };
  Recorder rec;
  auto opts = rec.options();
  opts.max_rate_limit_retries = 3;
  opts.backoff_max_s = 5;
  LiveBackend backend(opts);
  EXPECT_THROW(backend.complete(bundle(), target(server)), RateLimitError);
  EXPECT_EQ(server.requests_, 4);
  EXPECT_EQ(rec.sleeps, (std::vector<double>{2.0, 4.0, 5.0}));
}

TEST(LiveBackend, ReadTimeout) {
  StubServer server;
  server.handler_ = [](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(800));
    res.set_content(StubServer::reply("late"), "application/json");
  };
  Recorder rec;
  LiveBackend backend(rec.options());
  auto t = target(server);
  t.timeout_s = 0.2;
  EXPECT_THROW(backend.complete(bundle(), t), TimeoutError);
}

TEST(LiveBackend, ConnectionRefusedAndBadUrl) {
  Recorder rec;
  LiveBackend backend(rec.options());
  ModelTarget t;
  t.name = "m";
  t.endpoint = "http://127.0.0.1:1/v1/chat/completions";
  t.timeout_s = 2;
  EXPECT_THROW(backend.complete(bundle(), t), TransportError);
  t.endpoint = "ftp://example.com";
  EXPECT_THROW(backend.complete(bundle(), t), TransportError);
}

TEST(LiveBackend, CapsRequestsInFlight) {
  StubServer server;
  server.handler_ = [](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(60));
    res.set_content(StubServer::reply("ok"), "application/json");
  };
  Recorder rec;
  auto opts = rec.options();
  opts.max_in_flight = 2;
  LiveBackend backend(opts);
  std::vector<std::thread> threads;
  for (int k = 0; k < 6; ++k) {
    threads.emplace_back([&] { backend.complete(bundle(), target(server)); });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(server.requests_, 6);
  EXPECT_LE(server.max_in_flight_, 2);
  EXPECT_GE(server.max_in_flight_, 1);
}

TEST(LiveBackend, RecordsIntoReplayStore) {
  StubServer server;
  testing::TempDir dir;
  {
    ReplayStore store(dir / "rec.jsonl", ReplayStore::Mode::kAppend);
    Recorder rec;
    auto opts = rec.options();
    opts.record = &store;
    LiveBackend backend(opts);
    backend.complete(bundle("abc"), target(server));
  }
  const ReplayStore store(dir / "rec.jsonl", ReplayStore::Mode::kRead);
  ReplayBackend replay(store);
  EXPECT_EQ(replay.complete(bundle("abc"), target(server)).raw_response, "o3-mini saw 3 chars");
}

}  // namespace
}  // namespace edbench
