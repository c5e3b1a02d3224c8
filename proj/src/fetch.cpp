#include "hdna/fetch.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <sstream>

#include "hdna/html/tokenizer.hpp"
#include "hdna/time_util.hpp"

namespace hdna {
namespace {

using Clock = std::chrono::steady_clock;

struct Url {
  std::string scheme;  // lowercase
  std::string authority;
  std::string path;  // path + query, never empty
};

std::optional<Url> parse_url(const std::string& s) {
  std::size_t colon = s.find("://");
  if (colon == std::string::npos) return std::nullopt;
  Url u;
  u.scheme = html::to_ascii_lower(s.substr(0, colon));
  if (u.scheme != "http" && u.scheme != "https") return std::nullopt;
  std::size_t start = colon + 3;
  std::size_t end = s.find_first_of("/?#", start);
  u.authority = s.substr(start, end == std::string::npos ? std::string::npos : end - start);
  if (u.authority.empty()) return std::nullopt;
  if (std::size_t at = u.authority.rfind('@'); at != std::string::npos) {
    u.authority.erase(0, at + 1);
  }
  std::string rest = end == std::string::npos ? "" : s.substr(end);
  if (std::size_t hash = rest.find('#'); hash != std::string::npos) rest.resize(hash);
  if (rest.empty() || rest[0] != '/') rest.insert(0, "/");
  u.path = rest;
  return u;
}

std::string host_of(const std::string& authority) {
  if (!authority.empty() && authority[0] == '[') {
    return authority.substr(1, authority.find(']') - 1);
  }
  return authority.substr(0, authority.rfind(':'));
}

std::string env(const char* lower, const char* upper) {
  if (const char* v = std::getenv(lower); v && *v) return v;
  if (const char* v = std::getenv(upper); v && *v) return v;
  return {};
}

bool bypass_proxy(const std::string& host) {
  std::string list = env("no_proxy", "NO_PROXY");
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    if (item == "*") return true;
    if (item[0] == '.') item.erase(0, 1);
    if (host == item) return true;
    if (host.size() > item.size() && host.ends_with(item) &&
        host[host.size() - item.size() - 1] == '.') {
      return true;
    }
  }
  return false;
}

void apply_proxy(httplib::Client& cli, const Url& url) {
  std::string proxy = url.scheme == "https" ? env("https_proxy", "HTTPS_PROXY")
                                            : env("http_proxy", "HTTP_PROXY");
  if (proxy.empty() || bypass_proxy(html::to_ascii_lower(host_of(url.authority)))) return;
  if (proxy.find("://") == std::string::npos) proxy = "http://" + proxy;
  auto p = parse_url(proxy);
  if (!p) return;
  std::string host = host_of(p->authority);
  int port = 80;
  if (std::size_t c = p->authority.rfind(':');
      c != std::string::npos && p->authority.back() != ']') {
    port = std::atoi(p->authority.c_str() + c + 1);
  }
  cli.set_proxy(host, port);
}

bool is_redirect(int status) {
  return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

}  // namespace

bool is_remote(const std::string& arg) {
  std::string lower = html::to_ascii_lower(arg.substr(0, 8));
  return lower.starts_with("http://") || lower.starts_with("https://");
}

std::string resolve_url(const std::string& base, const std::string& reference) {
  if (parse_url(reference)) return reference;
  auto b = parse_url(base);
  if (!b) return reference;
  if (reference.starts_with("//")) return b->scheme + ":" + reference;
  std::string origin = b->scheme + "://" + b->authority;
  if (reference.starts_with("/")) return origin + reference;
  std::string dir = b->path.substr(0, b->path.find('?'));
  if (reference.starts_with("?")) return origin + dir + reference;
  dir.resize(dir.rfind('/') + 1);
  return origin + dir + reference;
}

FetchResult fetch(const std::string& url, const FetchConfig& config) {
  const auto started = Clock::now();
  const auto deadline = started + std::chrono::milliseconds(config.timeout_ms);
  std::string current = url;

  for (int hop = 0;; ++hop) {
    auto parsed = parse_url(current);
    if (!parsed) throw Error(ErrorKind::kInvalidArgument, "not an absolute http(s) URL: " + current);

    const auto remaining = deadline - Clock::now();
    if (remaining <= Clock::duration::zero()) {
      throw FetchError(ErrorKind::kTimeout, "timed out after " + std::to_string(config.timeout_ms) + " ms");
    }
    const auto remaining_us = std::chrono::duration_cast<std::chrono::microseconds>(remaining);

    httplib::Client cli(parsed->scheme + "://" + parsed->authority);
    cli.set_connection_timeout(remaining_us);
    cli.set_read_timeout(remaining_us);
    cli.set_write_timeout(remaining_us);
    cli.set_follow_location(false);
    cli.enable_server_certificate_verification(!config.insecure);
    apply_proxy(cli, *parsed);

    std::string body;
    bool too_large = false;
    bool timed_out = false;
    auto over_deadline = [&] {
      if (Clock::now() >= deadline) timed_out = true;
      return timed_out;
    };

    httplib::Headers headers{{"User-Agent", config.user_agent}, {"Accept", "text/html, */*;q=0.5"}};
    auto res = cli.Get(
        parsed->path, headers,
        [&](const httplib::Response& r) {
          if (r.has_header("Content-Length")) {
            auto len = std::strtoull(r.get_header_value("Content-Length").c_str(), nullptr, 10);
            if (len > config.max_body_bytes) {
              too_large = true;
              return false;
            }
          }
          return !over_deadline();
        },
        [&](const char* data, std::size_t len) {
          if (body.size() + len > config.max_body_bytes) {
            too_large = true;
            return false;
          }
          body.append(data, len);
          return !over_deadline();
        },
        [&](std::uint64_t, std::uint64_t) { return !over_deadline(); });

    if (too_large) {
      throw FetchError(ErrorKind::kBodyTooLarge,
                       "response body exceeds " + std::to_string(config.max_body_bytes) + " bytes");
    }
    if (!res) {
      if (timed_out || Clock::now() >= deadline || res.error() == httplib::Error::ConnectionTimeout) {
        throw FetchError(ErrorKind::kTimeout,
                         "timed out after " + std::to_string(config.timeout_ms) + " ms");
      }
      throw FetchError(ErrorKind::kNetworkError, current + ": " + httplib::to_string(res.error()));
    }

    const int status = res->status;
    if (is_redirect(status) && res->has_header("Location")) {
      if (hop >= config.max_redirects) {
        throw FetchError(ErrorKind::kTooManyRedirects,
                         "more than " + std::to_string(config.max_redirects) + " redirects", status);
      }
      current = resolve_url(current, res->get_header_value("Location"));
      continue;
    }
    if (status >= 400) {
      throw FetchError(ErrorKind::kNonSuccessStatus, current + " returned HTTP " + std::to_string(status),
                       status);
    }

    FetchResult out;
    out.url = url;
    out.final_url = current;
    out.status = status;
    out.body.bytes = std::move(body);
    if (res->has_header("Content-Type")) {
      out.body.declared_charset = html::charset_from_content_type(res->get_header_value("Content-Type"));
    }
    out.fetched_at = rfc3339_utc(std::chrono::system_clock::now());
    out.duration_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started).count();
    return out;
  }
}

}  // namespace hdna
