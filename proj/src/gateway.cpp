#include "edbench/gateway.h"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <thread>

#include <httplib.h>

#include "edbench/errors.h"

namespace edbench {

namespace {

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url, const std::string& model) {
  const auto scheme = url.find("://");
  const bool http = scheme != std::string::npos &&
                    (url.compare(0, scheme, "http") == 0 || url.compare(0, scheme, "https") == 0);
  if (!http) {
    throw TransportError(model, "endpoint must be an http(s) URL: '" + url + "'");
  }
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/v1/chat/completions"};
  return {url.substr(0, slash), url.substr(slash)};
}

// RAII slot on the in-flight semaphore.
template <typename Semaphore>
class Slot {
 public:
  explicit Slot(Semaphore& s) : s_(s) { s_.acquire(); }
  ~Slot() { s_.release(); }
  Slot(const Slot&) = delete;
  Slot& operator=(const Slot&) = delete;

 private:
  Semaphore& s_;
};

std::string snippet(const std::string& body) {
  constexpr std::size_t kMax = 200;
  return body.size() <= kMax ? body : body.substr(0, kMax) + "...";
}

}  // namespace

void ModelTarget::validate() const {
  if (name.empty()) throw ConfigError("model target needs a name");
  if (!(timeout_s > 0.0)) throw ConfigError("model '" + name + "': timeout must be > 0");
  if (max_tokens < 0) throw ConfigError("model '" + name + "': max_tokens must be >= 0");
}

void from_json(const nlohmann::json& j, ModelTarget& t) {
  try {
    t.name = j.at("name").get<std::string>();
    t.model_id = j.value("model_id", std::string());
    t.endpoint = j.value("endpoint", std::string());
    t.credential_env = j.value("credential_env", std::string());
    t.temperature = j.value("temperature", 1.0);
    t.max_tokens = j.value("max_tokens", 0);
    t.timeout_s = j.value("timeout_s", 600.0);
    t.extra = j.value("extra", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model target: ") + e.what());
  }
  if (!t.extra.is_object()) throw ConfigError("model '" + t.name + "': extra must be an object");
  t.validate();
}

void to_json(nlohmann::json& j, const ModelTarget& t) {
  j = nlohmann::json{{"name", t.name},
                     {"model_id", t.wire_model()},
                     {"endpoint", t.endpoint},
                     {"credential_env", t.credential_env},
                     {"temperature", t.temperature},
                     {"max_tokens", t.max_tokens},
                     {"timeout_s", t.timeout_s},
                     {"extra", t.extra}};
}

LlmExchange ReplayBackend::complete(const PromptBundle& bundle, const ModelTarget& target) {
  auto hit = store_.get(bundle.fingerprint, target.name);
  if (!hit) throw FixtureMissError(bundle.fingerprint, target.name);
  return *hit;
}

nlohmann::json chat_request_body(const PromptBundle& bundle, const ModelTarget& target) {
  nlohmann::json body = {
      {"model", target.wire_model()},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", bundle.text}}})},
      {"temperature", target.temperature},
  };
  if (target.max_tokens > 0) body["max_tokens"] = target.max_tokens;
  for (const auto& [key, value] : target.extra.items()) body[key] = value;
  return body;
}

std::string chat_response_content(const std::string& body, const std::string& model) {
  try {
    const auto j = nlohmann::json::parse(body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw TransportError(model, "message content is not a string");
    return content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(model, std::string("malformed chat completion: ") + e.what());
  }
}

LiveBackend::LiveBackend(LiveOptions options)
    : options_(std::move(options)),
      slots_(std::clamp<std::ptrdiff_t>(options_.max_in_flight, 1, kMaxInFlight)) {
  if (!options_.sleep) {
    options_.sleep = [](double s) { std::this_thread::sleep_for(std::chrono::duration<double>(s)); };
  }
  if (!options_.log) {
    options_.log = [](const std::string& msg) { std::cerr << "[gateway] " << msg << "\n"; };
  }
}

LlmExchange LiveBackend::complete(const PromptBundle& bundle, const ModelTarget& target) {
  target.validate();
  const std::string& model = target.name;
  const Endpoint ep = split_endpoint(target.endpoint, model);

  httplib::Headers headers;
  if (!target.credential_env.empty()) {
    const char* token = std::getenv(target.credential_env.c_str());
    if (token == nullptr || *token == '\0') {
      throw AuthError(model, "credential env var " + target.credential_env + " is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }
  const std::string body = chat_request_body(bundle, target).dump();

  httplib::Client client(ep.base);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(target.timeout_s));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  Slot slot(slots_);
  LlmExchange exchange;
  exchange.prompt_fingerprint = bundle.fingerprint;
  exchange.model = model;
  exchange.transport_meta["endpoint"] = target.endpoint;

  double backoff = options_.backoff_initial_s;
  for (int attempt = 1;; ++attempt) {
    const auto start = std::chrono::steady_clock::now();
    auto res = client.Post(ep.path, headers, body, "application/json");
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    exchange.transport_meta["attempts"] = std::to_string(attempt);

    if (!res) {
      const auto err = res.error();
      const std::string what = httplib::to_string(err);
      options_.log(model + ": attempt " + std::to_string(attempt) + " failed: " + what);
      if (err == httplib::Error::ConnectionTimeout ||
          ((err == httplib::Error::Read || err == httplib::Error::Write) &&
           elapsed >= 0.9 * target.timeout_s)) {
        throw TimeoutError(model, "request timed out after " + std::to_string(elapsed) + " s");
      }
      throw TransportError(model, what);
    }

    const int status = res->status;
    if (status == 429) {
      options_.log(model + ": attempt " + std::to_string(attempt) + " rate limited");
      exchange.transport_meta["rate_limited_attempts"] = std::to_string(attempt);
      if (attempt > options_.max_rate_limit_retries) {
        throw RateLimitError(model, "rate limited after " + std::to_string(attempt) + " attempts");
      }
      double wait = backoff;
      if (res->has_header("Retry-After")) {
        wait = std::max(wait, std::atof(res->get_header_value("Retry-After").c_str()));
      }
      options_.sleep(std::min(wait, options_.backoff_max_s));
      backoff = std::min(2.0 * backoff, options_.backoff_max_s);
      continue;
    }
    if (status == 401 || status == 403) {
      throw AuthError(model, "HTTP " + std::to_string(status) + ": " + snippet(res->body));
    }
    if (status == 408 || status == 504) {
      throw TimeoutError(model, "HTTP " + std::to_string(status));
    }
    if (status < 200 || status >= 300) {
      throw TransportError(model, "HTTP " + std::to_string(status) + ": " + snippet(res->body));
    }

    exchange.raw_response = chat_response_content(res->body, model);
    exchange.latency_s = elapsed;
    exchange.recorded_at = utc_timestamp();
    exchange.transport_meta["status"] = std::to_string(status);
    break;
  }

  if (options_.record != nullptr) options_.record->put(exchange);
  return exchange;
}

}  // namespace edbench
