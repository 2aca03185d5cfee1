#include <chrono>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "aica/backend.hpp"
#include "aica/base64.hpp"

namespace aica {

namespace {

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;  // leading slash
};

SplitUrl split_url(const std::string& url) {
  SplitUrl out{url, "/"};
  std::size_t scheme = url.find("://");
  if (scheme == std::string::npos) return out;
  std::size_t slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return out;
  out.base = url.substr(0, slash);
  out.path = url.substr(slash);
  return out;
}

Errc classify_status(int status) noexcept {
  if (status == 401 || status == 403) return Errc::AuthFailure;
  if (status == 429) return Errc::RateLimited;
  return Errc::ProtocolError;
}

}  // namespace

std::string HttpBackend::request_body_json(const CompletionRequest& request) {
  nlohmann::ordered_json body;
  body["model"] = request.model_name;
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;

  nlohmann::ordered_json content = nlohmann::ordered_json::array();
  content.push_back({{"type", "text"}, {"text", request.prompt}});
  if (request.image.has_value()) {
    const std::vector<std::uint8_t> png = encode_png(*request.image);
    nlohmann::ordered_json image_part;
    image_part["type"] = "image_url";
    image_part["image_url"] = {
        {"url", "data:image/png;base64," + base64_encode(png)}};
    content.push_back(std::move(image_part));
  }
  nlohmann::ordered_json message;
  message["role"] = "user";
  message["content"] = std::move(content);
  body["messages"] = nlohmann::ordered_json::array({std::move(message)});
  return body.dump();
}

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {}

std::string HttpBackend::id() const {
  return "http:" + options_.model_name;
}

Result<CompletionResult> HttpBackend::attempt(const CompletionRequest& request) {
  const SplitUrl url = split_url(options_.endpoint);
  httplib::Client client(url.base);
  const auto timeout_sec =
      std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  client.set_connection_timeout(timeout_sec.count(), 0);
  client.set_read_timeout(timeout_sec.count(), 0);
  client.set_write_timeout(timeout_sec.count(), 0);

  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_key);
  }

  const auto start = std::chrono::steady_clock::now();
  httplib::Result res =
      client.Post(url.path, headers, request_body_json(request), "application/json");
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);

  if (!res) {
    return make_error(Errc::Timeout,
                      "request failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    return make_error(classify_status(res->status),
                      "HTTP " + std::to_string(res->status) + ": " + res->body);
  }

  nlohmann::json doc = nlohmann::json::parse(res->body, nullptr, false);
  if (doc.is_discarded()) {
    return make_error(Errc::ProtocolError, "response is not JSON");
  }
  std::string text;
  try {
    const auto& content = doc.at("choices").at(0).at("message").at("content");
    if (content.is_string()) {
      text = content.get<std::string>();
    } else if (content.is_array()) {
      for (const auto& part : content) {
        if (part.contains("text")) text += part["text"].get<std::string>();
      }
    } else {
      return make_error(Errc::ProtocolError, "unexpected content type in response");
    }
  } catch (const nlohmann::json::exception&) {
    return make_error(Errc::ProtocolError, "response missing choices[0].message.content");
  }

  CompletionResult result;
  result.text = std::move(text);
  result.latency_ms = static_cast<long>(elapsed.count());
  result.backend_id = id();
  if (doc.contains("usage") && doc["usage"].is_object()) {
    TokenCounts counts;
    counts.prompt = doc["usage"].value("prompt_tokens", 0l);
    counts.completion = doc["usage"].value("completion_tokens", 0l);
    result.token_counts = counts;
  }
  return result;
}

Result<CompletionResult> HttpBackend::complete(const CompletionRequest& request) {
  if (request.prompt.empty()) {
    return make_error(Errc::ProtocolError, "empty prompt");
  }
  const RetryPolicy& policy = options_.retry;
  auto sleep = policy.sleeper
                   ? policy.sleeper
                   : [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };

  Result<CompletionResult> last = make_error(Errc::ProtocolError, "no attempt made");
  double delay_ms = static_cast<double>(policy.base_delay.count());
  for (int attempt = 1; attempt <= std::max(1, policy.max_attempts); ++attempt) {
    last = this->attempt(request);
    if (last.ok() || !retryable(last.error().code)) return last;
    if (attempt < policy.max_attempts) {
      sleep(std::chrono::milliseconds(static_cast<long>(delay_ms)));
      delay_ms *= policy.factor;
    }
  }
  return last;
}

}  // namespace aica
