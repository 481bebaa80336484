#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "praisekit/error.hpp"
#include "praisekit/rng.hpp"

namespace praisekit {

enum class Role { system, user, assistant };

inline std::string role_name(Role r) {
  switch (r) {
    case Role::system:
      return "system";
    case Role::user:
      return "user";
    case Role::assistant:
      return "assistant";
  }
  return "?";
}

struct ChatMessage {
  Role role = Role::user;
  std::string content;
};

struct CompletionRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  std::optional<int> max_tokens;
};

struct ProviderConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key_env = "OPENAI_API_KEY";
  std::string model = "gpt-4o";
  double timeout_seconds = 60.0;
  int max_retries = 4;  // capped at 8
  int max_concurrency = 4;
};

/// Abstraction over chat-completion backends. Implementations must be safe
/// to call from multiple threads.
class CompletionProvider {
 public:
  virtual ~CompletionProvider() = default;
  virtual std::string complete(const CompletionRequest& req) = 0;
};

// ---------------------------------------------------------------------------
// HTTP backend
// ---------------------------------------------------------------------------

struct HttpResult {
  int status = 0;
  std::string body;
  bool transport_failed = false;
  bool timed_out = false;
  std::string error;
};

/// Transport seam so tests can observe and fake the wire.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResult post(const std::string& base_url, const std::string& path,
                          const std::vector<std::pair<std::string, std::string>>& headers,
                          const std::string& body, double timeout_seconds) = 0;
};

namespace detail {

class Semaphore {
 public:
  explicit Semaphore(int count) : count_(count) {}
  void acquire() {
    std::unique_lock<std::mutex> lk(m_);
    cv_.wait(lk, [&] { return count_ > 0; });
    --count_;
  }
  void release() {
    {
      std::lock_guard<std::mutex> lk(m_);
      ++count_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex m_;
  std::condition_variable cv_;
  int count_;
};

struct SemaphoreGuard {
  explicit SemaphoreGuard(Semaphore& s) : sem(s) { sem.acquire(); }
  ~SemaphoreGuard() { sem.release(); }
  Semaphore& sem;
};

}  // namespace detail

/// Client for the standard chat-completions wire schema: POSTs
/// {model, messages, temperature, max_tokens} to {base_url}/chat/completions
/// with bearer auth, and returns the first choice's message content.
///
/// 429, 5xx and transport failures are retried with exponential backoff and
/// full jitter (initial 1s, factor 2, cap 32s) up to max_retries; auth and
/// malformed request/response errors are never retried. A semaphore caps the
/// number of in-flight requests at max_concurrency.
class HttpProvider : public CompletionProvider {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  HttpProvider(ProviderConfig cfg, std::shared_ptr<HttpTransport> transport,
               Sleeper sleeper = nullptr,
               std::optional<std::uint64_t> jitter_seed = std::nullopt)
      : cfg_(std::move(cfg)),
        transport_(std::move(transport)),
        sleeper_(sleeper ? std::move(sleeper)
                         : [](std::chrono::milliseconds d) {
                             std::this_thread::sleep_for(d);
                           }),
        jitter_rng_(jitter_seed ? *jitter_seed : std::random_device{}()),
        semaphore_(std::max(1, cfg_.max_concurrency)) {
    if (cfg_.max_retries < 0 || cfg_.max_retries > 8) {
      throw ConfigError("max_retries must be in [0, 8]");
    }
    if (cfg_.timeout_seconds <= 0.0) {
      throw ConfigError("timeout must be positive");
    }
  }

  std::string complete(const CompletionRequest& req) override {
    std::string api_key;
    if (!cfg_.api_key_env.empty()) {
      const char* key = std::getenv(cfg_.api_key_env.c_str());
      if (key == nullptr || *key == '\0') {
        throw AuthMissing("environment variable " + cfg_.api_key_env +
                          " is not set");
      }
      api_key = key;
    }

    nlohmann::json body;
    body["model"] = req.model.empty() ? cfg_.model : req.model;
    body["messages"] = nlohmann::json::array();
    for (const ChatMessage& m : req.messages) {
      body["messages"].push_back(
          {{"role", role_name(m.role)}, {"content", m.content}});
    }
    body["temperature"] = req.temperature;
    if (req.max_tokens) body["max_tokens"] = *req.max_tokens;

    std::vector<std::pair<std::string, std::string>> headers = {
        {"Content-Type", "application/json"}};
    if (!api_key.empty()) {
      headers.emplace_back("Authorization", "Bearer " + api_key);
    }

    const std::string payload = body.dump();
    int retries = 0;
    for (int attempt = 0;; ++attempt) {
      HttpResult res;
      {
        detail::SemaphoreGuard guard(semaphore_);
        res = transport_->post(cfg_.base_url, "/chat/completions", headers,
                               payload, cfg_.timeout_seconds);
      }
      if (!res.transport_failed && res.status == 200) {
        retries_total_ += retries;
        return extract_content(res.body);
      }
      const bool retryable =
          res.transport_failed || res.status == 429 || res.status >= 500;
      if (!retryable) {
        if (res.status == 401 || res.status == 403) {
          throw ProviderError("authentication rejected (HTTP " +
                              std::to_string(res.status) + ")");
        }
        throw ProviderError("request rejected (HTTP " +
                            std::to_string(res.status) + "): " + res.body);
      }
      if (attempt >= cfg_.max_retries) {
        retries_total_ += retries;
        if (res.timed_out) throw Timeout("request timed out after retries");
        if (res.status == 429) {
          throw RateLimited("rate limited after " + std::to_string(retries) +
                            " retries");
        }
        throw ProviderError("request failed after retries: " +
                            (res.transport_failed ? res.error
                                                  : "HTTP " + std::to_string(res.status)));
      }
      ++retries;
      sleeper_(backoff_delay(attempt));
    }
  }

  /// Total retries performed across all calls (for logs and tests).
  long long retries_total() const { return retries_total_.load(); }

 private:
  std::chrono::milliseconds backoff_delay(int attempt) {
    double cap_ms = 1000.0;
    for (int i = 0; i < attempt; ++i) cap_ms = std::min(cap_ms * 2.0, 32000.0);
    double jitter;
    {
      std::lock_guard<std::mutex> lk(jitter_mutex_);
      jitter = jitter_rng_.next_double();
    }
    return std::chrono::milliseconds(
        static_cast<long long>(cap_ms * jitter));
  }

  std::string extract_content(const std::string& body) {
    nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded()) {
      throw MalformedResponse("response body is not valid JSON");
    }
    if (!j.contains("choices") || !j["choices"].is_array() ||
        j["choices"].empty()) {
      throw MalformedResponse("response is missing 'choices'");
    }
    const auto& first = j["choices"][0];
    if (!first.contains("message") || !first["message"].contains("content") ||
        !first["message"]["content"].is_string()) {
      throw MalformedResponse("response is missing 'choices[0].message.content'");
    }
    return first["message"]["content"].get<std::string>();
  }

  ProviderConfig cfg_;
  std::shared_ptr<HttpTransport> transport_;
  Sleeper sleeper_;
  Rng jitter_rng_;
  std::mutex jitter_mutex_;
  detail::Semaphore semaphore_;
  std::atomic<long long> retries_total_{0};
};

}  // namespace praisekit
