#include "aica/backend.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "aica/hash.hpp"

namespace aica {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::NoLabelFound: return "NoLabelFound";
    case Errc::TaxonomyMismatch: return "TaxonomyMismatch";
    case Errc::NoRegionsFound: return "NoRegionsFound";
    case Errc::ParseFailure: return "ParseFailure";
    case Errc::MalformedJson: return "MalformedJson";
    case Errc::MissingCriterion: return "MissingCriterion";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::MissingSection: return "MissingSection";
    case Errc::EmptyRegions: return "EmptyRegions";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::Timeout: return "Timeout";
    case Errc::RateLimited: return "RateLimited";
    case Errc::AuthFailure: return "AuthFailure";
    case Errc::ProtocolError: return "ProtocolError";
    case Errc::ScriptExhausted: return "ScriptExhausted";
    case Errc::NoMatch: return "NoMatch";
    case Errc::ImageLoad: return "ImageLoad";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::InvalidManifest: return "InvalidManifest";
    case Errc::IoError: return "IoError";
  }
  return "?";
}

bool retryable(Errc code) noexcept {
  return code == Errc::Timeout || code == Errc::RateLimited;
}

Result<FixtureScript> FixtureScript::from_json(std::string_view text) {
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    return make_error(Errc::InvalidConfig, "fixture script is not a JSON object");
  }
  FixtureScript script;
  const std::string mode = doc.value("mode", "keyed");
  if (mode == "sequential") {
    script.mode = Mode::Sequential;
  } else if (mode == "keyed") {
    script.mode = Mode::Keyed;
  } else {
    return make_error(Errc::InvalidConfig, "unknown fixture mode: " + mode);
  }
  if (!doc.contains("entries") || !doc["entries"].is_array()) {
    return make_error(Errc::InvalidConfig, "fixture script needs an entries array");
  }
  for (const auto& e : doc["entries"]) {
    FixtureEntry entry;
    if (!e.contains("response") || !e["response"].is_string()) {
      return make_error(Errc::InvalidConfig, "fixture entry needs a response string");
    }
    entry.response = e["response"].get<std::string>();
    const auto& match = e.contains("match") ? e["match"] : nlohmann::json("any");
    if (match.is_string() && match.get<std::string>() == "any") {
      entry.kind = FixtureEntry::MatchKind::Any;
    } else if (match.is_object() && match.contains("template")) {
      entry.kind = FixtureEntry::MatchKind::Template;
      entry.key = match["template"].get<std::string>();
    } else if (match.is_object() && match.contains("prompt_hash")) {
      entry.kind = FixtureEntry::MatchKind::PromptHash;
      entry.key = match["prompt_hash"].get<std::string>();
    } else {
      return make_error(Errc::InvalidConfig,
                        "fixture match must be \"any\", {template}, or {prompt_hash}");
    }
    script.entries.push_back(std::move(entry));
  }
  return script;
}

Result<FixtureScript> FixtureScript::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return make_error(Errc::IoError, "cannot open fixture script: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

namespace {

bool entry_matches(const FixtureEntry& entry, const CompletionRequest& request,
                   const std::string& hash) {
  switch (entry.kind) {
    case FixtureEntry::MatchKind::Any: return true;
    case FixtureEntry::MatchKind::Template: return entry.key == request.template_hint;
    case FixtureEntry::MatchKind::PromptHash: return entry.key == hash;
  }
  return false;
}

}  // namespace

FixtureBackend::FixtureBackend(FixtureScript script) : script_(std::move(script)) {}

Result<CompletionResult> FixtureBackend::complete(const CompletionRequest& request) {
  if (request.prompt.empty()) {
    return make_error(Errc::ProtocolError, "empty prompt");
  }
  const std::string hash = prompt_hash(request.prompt);
  std::lock_guard<std::mutex> lock(mutex_);

  const FixtureEntry* hit = nullptr;
  if (script_.mode == FixtureScript::Mode::Sequential) {
    if (next_ >= script_.entries.size()) {
      return make_error(Errc::ScriptExhausted,
                        "script exhausted after " + std::to_string(script_.entries.size()) +
                            " entries");
    }
    const FixtureEntry& entry = script_.entries[next_];
    if (!entry_matches(entry, request, hash)) {
      return make_error(Errc::NoMatch, "sequential entry " + std::to_string(next_) +
                                           " does not match prompt " + hash +
                                           " (template " + request.template_hint + ")");
    }
    ++next_;
    hit = &entry;
  } else {
    for (const FixtureEntry& entry : script_.entries) {
      if (entry_matches(entry, request, hash)) {
        hit = &entry;
        break;
      }
    }
    if (hit == nullptr) {
      return make_error(Errc::NoMatch, "no fixture entry matches prompt " + hash +
                                           " (template " + request.template_hint + ")");
    }
  }

  log_.push_back(LogEntry{request.template_hint, request.prompt, hit->response});
  CompletionResult result;
  result.text = hit->response;
  result.latency_ms = 0;
  result.backend_id = id();
  return result;
}

std::vector<FixtureBackend::LogEntry> FixtureBackend::log() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return log_;
}

std::size_t FixtureBackend::calls() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return log_.size();
}

}  // namespace aica
