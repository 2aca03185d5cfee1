#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "aica/image.hpp"
#include "aica/result.hpp"

namespace aica {

struct TokenCounts {
  long prompt = 0;
  long completion = 0;
};

struct CompletionRequest {
  std::string prompt;
  std::optional<RasterImage> image;
  double temperature = 0.0;
  int max_tokens = 1024;
  std::string model_name;
  // Which template produced the prompt; lets fixture scripts match on the
  // template id instead of a prompt hash. Ignored by the HTTP backend.
  std::string template_hint;
};

struct CompletionResult {
  std::string text;
  long latency_ms = 0;
  std::optional<TokenCounts> token_counts;
  std::string backend_id;
};

// (text prompt, optional image) -> text. Implementations are shareable
// across concurrent workers.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual Result<CompletionResult> complete(const CompletionRequest& request) = 0;
  virtual std::string id() const = 0;
};

bool retryable(Errc code) noexcept;

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{1000};
  double factor = 2.0;
  // Injectable for tests; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleeper;
};

// --- deterministic scripted backend -----------------------------------------

struct FixtureEntry {
  enum class MatchKind { Any, Template, PromptHash };
  MatchKind kind = MatchKind::Any;
  std::string key;  // template id name or 16-hex prompt hash
  std::string response;
};

struct FixtureScript {
  enum class Mode { Sequential, Keyed };
  Mode mode = Mode::Keyed;
  std::vector<FixtureEntry> entries;

  static Result<FixtureScript> from_json(std::string_view text);
  static Result<FixtureScript> load(const std::filesystem::path& path);
};

class FixtureBackend : public Backend {
 public:
  explicit FixtureBackend(FixtureScript script);

  Result<CompletionResult> complete(const CompletionRequest& request) override;
  std::string id() const override { return "fixture"; }

  struct LogEntry {
    std::string template_hint;
    std::string prompt;
    std::string response;
  };
  std::vector<LogEntry> log() const;
  std::size_t calls() const;

 private:
  FixtureScript script_;
  mutable std::mutex mutex_;
  std::size_t next_ = 0;  // sequential-mode cursor
  std::vector<LogEntry> log_;
};

// --- hosted chat-completion backend ------------------------------------------

struct HttpBackendOptions {
  std::string endpoint;  // full URL, e.g. http://host:1234/v1/chat/completions
  std::string api_key;
  std::string model_name;
  std::chrono::milliseconds timeout{120000};
  RetryPolicy retry;
};

class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendOptions options);

  Result<CompletionResult> complete(const CompletionRequest& request) override;
  std::string id() const override;

  // Request serialization is part of the wire contract: identical requests
  // must produce identical bytes (stable field ordering).
  static std::string request_body_json(const CompletionRequest& request);

 private:
  Result<CompletionResult> attempt(const CompletionRequest& request);

  HttpBackendOptions options_;
};

}  // namespace aica
