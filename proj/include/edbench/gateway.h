#pragma once

#include <functional>
#include <memory>
#include <semaphore>
#include <string>

#include <nlohmann/json.hpp>

#include "edbench/prompt.h"
#include "edbench/replay_store.h"

namespace edbench {

// A chat-completions endpoint and the settings sent with every request.
struct ModelTarget {
  std::string name;            // display name; also the replay key
  std::string model_id;        // "model" field on the wire; defaults to name
  std::string endpoint;        // e.g. https://api.openai.com/v1/chat/completions
  std::string credential_env;  // env var holding the bearer token; empty = no auth
  double temperature = 1.0;
  int max_tokens = 0;          // 0 leaves it to the provider
  double timeout_s = 600.0;
  nlohmann::json extra = nlohmann::json::object();  // merged into the request body

  // Throws ConfigError on an empty name or non-positive timeout.
  void validate() const;
  const std::string& wire_model() const { return model_id.empty() ? name : model_id; }
};

void from_json(const nlohmann::json& j, ModelTarget& t);
void to_json(nlohmann::json& j, const ModelTarget& t);

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;

  // One prompt, one completed exchange.
  virtual LlmExchange complete(const PromptBundle& bundle, const ModelTarget& target) = 0;
};

// Serves recorded exchanges; a missing (fingerprint, model) pair throws
// FixtureMissError.
class ReplayBackend : public CompletionBackend {
 public:
  explicit ReplayBackend(const ReplayStore& store) : store_(store) {}

  LlmExchange complete(const PromptBundle& bundle, const ModelTarget& target) override;

 private:
  const ReplayStore& store_;
};

struct LiveOptions {
  std::ptrdiff_t max_in_flight = 2;
  int max_rate_limit_retries = 4;
  double backoff_initial_s = 2.0;
  double backoff_max_s = 60.0;
  ReplayStore* record = nullptr;  // every completed exchange is appended here
  std::function<void(double seconds)> sleep;  // defaults to a real sleep
  std::function<void(const std::string&)> log;  // defaults to stderr
};

// OpenAI-compatible chat completions over HTTP(S): the whole prompt goes out
// as a single user message. A 429 is retried with exponential backoff up to
// max_rate_limit_retries, each attempt logged and counted in transport_meta;
// nothing else is retried.
//
// Errors: AuthError (401/403, or credential env var unset), TimeoutError,
// RateLimitError (retries exhausted), TransportError (anything else).
class LiveBackend : public CompletionBackend {
 public:
  explicit LiveBackend(LiveOptions options = {});

  LlmExchange complete(const PromptBundle& bundle, const ModelTarget& target) override;

 private:
  static constexpr std::ptrdiff_t kMaxInFlight = 64;

  LiveOptions options_;
  std::counting_semaphore<kMaxInFlight> slots_;
};

// Builds the chat-completions request body for `target`.
nlohmann::json chat_request_body(const PromptBundle& bundle, const ModelTarget& target);

// Extracts choices[0].message.content; throws TransportError naming `model`.
std::string chat_response_content(const std::string& body, const std::string& model);

}  // namespace edbench
