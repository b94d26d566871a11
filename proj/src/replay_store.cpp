#include "edbench/replay_store.h"

#include <chrono>
#include <ctime>
#include <mutex>

#include <nlohmann/json.hpp>

#include "edbench/errors.h"

namespace edbench {

void to_json(nlohmann::json& j, const LlmExchange& e) {
  j = nlohmann::json{{"fingerprint", e.prompt_fingerprint},
                     {"model", e.model},
                     {"raw_response", e.raw_response},
                     {"latency_s", e.latency_s},
                     {"recorded_at", e.recorded_at},
                     {"transport_meta", e.transport_meta}};
}

void from_json(const nlohmann::json& j, LlmExchange& e) {
  e.prompt_fingerprint = j.at("fingerprint").get<std::string>();
  e.model = j.at("model").get<std::string>();
  e.raw_response = j.at("raw_response").get<std::string>();
  e.latency_s = j.at("latency_s").get<double>();
  e.recorded_at = j.value("recorded_at", std::string());
  e.transport_meta = j.value("transport_meta", std::map<std::string, std::string>{});
}

ReplayStore::ReplayStore(std::filesystem::path path, Mode mode)
    : path_(std::move(path)), mode_(mode) {
  std::error_code ec;
  const bool exists = std::filesystem::exists(path_, ec);
  if (!exists && mode_ == Mode::kRead) {
    throw IoError("replay store not found: " + path_.string());
  }

  if (exists) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) throw IoError("cannot read replay store " + path_.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      try {
        auto e = nlohmann::json::parse(line).get<LlmExchange>();
        Key key{e.prompt_fingerprint, e.model};
        index_.insert_or_assign(std::move(key), std::move(e));
      } catch (const std::exception& ex) {
        warnings_.push_back(path_.string() + ":" + std::to_string(line_no) +
                            ": skipped unreadable record (" + ex.what() + ")");
      }
    }
  }

  if (mode_ == Mode::kAppend) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
    out_.open(path_, std::ios::binary | std::ios::app);
    if (!out_) throw IoError("cannot open replay store for append: " + path_.string());
  }
}

std::optional<LlmExchange> ReplayStore::get(std::string_view fingerprint,
                                            std::string_view model) const {
  std::shared_lock lock(mu_);
  const auto it = index_.find(std::pair{std::string(fingerprint), std::string(model)});
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void ReplayStore::put(const LlmExchange& exchange) {
  if (mode_ != Mode::kAppend) throw IoError("replay store opened read-only: " + path_.string());
  const std::string line = nlohmann::json(exchange).dump() + "\n";
  std::unique_lock lock(mu_);
  out_ << line;
  out_.flush();
  if (!out_) throw IoError("append to replay store failed: " + path_.string());
  index_.insert_or_assign(Key{exchange.prompt_fingerprint, exchange.model}, exchange);
}

std::size_t ReplayStore::size() const {
  std::shared_lock lock(mu_);
  return index_.size();
}

std::vector<std::string> ReplayStore::warnings() const {
  std::shared_lock lock(mu_);
  return warnings_;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace edbench
