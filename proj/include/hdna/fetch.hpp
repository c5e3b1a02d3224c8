#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "hdna/error.hpp"
#include "hdna/html/charset.hpp"
#include "hdna/version.hpp"

namespace hdna {

struct FetchConfig {
  int timeout_ms = 10'000;  // whole request chain, redirects included
  int max_redirects = 5;
  std::size_t max_body_bytes = 8u << 20;
  std::string user_agent = "hdna/" + std::string(kVersion);
  bool insecure = false;  // skip TLS certificate verification
};

struct FetchResult {
  std::string url;        // as requested
  std::string final_url;  // after redirects
  int status = 0;
  RawHtml body;
  std::string fetched_at;  // RFC 3339 UTC, taken when the response completed
  std::int64_t duration_ms = 0;
};

class FetchError : public Error {
 public:
  FetchError(ErrorKind kind, const std::string& message, std::optional<int> status = {})
      : Error(kind, message), status_(status) {}

  std::optional<int> status() const noexcept { return status_; }

 private:
  std::optional<int> status_;
};

// Single GET with manual redirect handling and no retries. Throws FetchError
// with kind kTimeout, kTooManyRedirects, kBodyTooLarge, kNetworkError or
// kNonSuccessStatus (status >= 400), or Error(kInvalidArgument) for a URL
// that is not absolute http(s).
FetchResult fetch(const std::string& url, const FetchConfig& config = {});

// Resolves a Location header value against the URL it came from.
std::string resolve_url(const std::string& base, const std::string& reference);

bool is_remote(const std::string& arg);

}  // namespace hdna
