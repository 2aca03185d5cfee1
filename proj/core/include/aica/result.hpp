#pragma once

#include <string>
#include <utility>
#include <variant>

namespace aica {

// Declared failure modes across the toolkit. Parsers and backends report
// these instead of throwing; arbitrary input must map to a value or one of
// these codes.
enum class Errc {
  // label / response parsing
  NoLabelFound,
  TaxonomyMismatch,
  NoRegionsFound,
  ParseFailure,
  MalformedJson,
  MissingCriterion,
  OutOfRange,
  MissingSection,
  EmptyRegions,
  IndexOutOfRange,
  // backends
  Timeout,
  RateLimited,
  AuthFailure,
  ProtocolError,
  ScriptExhausted,
  NoMatch,
  ImageLoad,
  // metrics / config / io
  EmptyInput,
  DimensionMismatch,
  InvalidConfig,
  InvalidManifest,
  IoError,
};

const char* errc_name(Errc code) noexcept;

struct Error {
  Errc code;
  std::string message;
};

inline Error make_error(Errc code, std::string message = {}) {
  return Error{code, std::move(message)};
}

template <typename T>
class [[nodiscard]] Result {
 public:
  Result(T value) : v_(std::move(value)) {}
  Result(Error error) : v_(std::move(error)) {}

  bool ok() const noexcept { return std::holds_alternative<T>(v_); }
  explicit operator bool() const noexcept { return ok(); }

  T& value() & { return std::get<T>(v_); }
  const T& value() const& { return std::get<T>(v_); }
  T&& take() && { return std::get<T>(std::move(v_)); }

  const Error& error() const { return std::get<Error>(v_); }

 private:
  std::variant<T, Error> v_;
};

// Result for operations that only signal success/failure.
using Status = Result<std::monostate>;

inline Status ok_status() { return Status(std::monostate{}); }

}  // namespace aica
