#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace edbench {

// One prompt -> response interaction, immutable once recorded.
struct LlmExchange {
  std::string prompt_fingerprint;
  std::string model;
  std::string raw_response;
  double latency_s = 0.0;
  std::string recorded_at;  // ISO-8601 UTC
  std::map<std::string, std::string> transport_meta;

  friend bool operator==(const LlmExchange&, const LlmExchange&) = default;
};

// Store line format:
//   {"fingerprint", "model", "raw_response", "latency_s", "recorded_at",
//    "transport_meta"}
void to_json(nlohmann::json& j, const LlmExchange& e);
void from_json(const nlohmann::json& j, LlmExchange& e);

// Append-only JSONL log of exchanges keyed by (prompt fingerprint, model).
// A repeated key appends a new line and shadows the older record. Unreadable
// lines are skipped and reported through warnings(). Readers may run
// concurrently; appends are serialized.
class ReplayStore {
 public:
  enum class Mode {
    kRead,    // the file must exist
    kAppend,  // created if missing
  };

  // Throws IoError when the file cannot be opened in the requested mode.
  ReplayStore(std::filesystem::path path, Mode mode);

  ReplayStore(const ReplayStore&) = delete;
  ReplayStore& operator=(const ReplayStore&) = delete;

  std::optional<LlmExchange> get(std::string_view fingerprint, std::string_view model) const;

  // Throws IoError in read mode or when the append fails.
  void put(const LlmExchange& exchange);

  std::size_t size() const;  // distinct keys
  std::vector<std::string> warnings() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  using Key = std::pair<std::string, std::string>;

  std::filesystem::path path_;
  Mode mode_;
  mutable std::shared_mutex mu_;
  std::map<Key, LlmExchange, std::less<>> index_;
  std::vector<std::string> warnings_;
  std::ofstream out_;
};

// Current time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace edbench
