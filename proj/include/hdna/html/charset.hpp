#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace hdna {

// Undecoded page bytes plus the charset label the transport declared, if any.
struct RawHtml {
  std::string bytes;
  std::optional<std::string> declared_charset;
};

namespace html {

// Extracts `charset=` from a Content-Type header value.
std::optional<std::string> charset_from_content_type(std::string_view content_type);

// Looks for a <meta charset> / <meta http-equiv content> declaration in the
// first 1024 bytes.
std::optional<std::string> prescan_meta_charset(std::string_view bytes);

// Decodes to UTF-8. Precedence: byte order mark, transport label, meta
// prescan, UTF-8. Undecodable sequences become U+FFFD. Throws
// Error(kCharsetUndecodable) only when a declared label is unknown and the
// bytes are not valid UTF-8 either.
std::string decode_to_utf8(const RawHtml& input);

bool is_valid_utf8(std::string_view bytes);

}  // namespace html
}  // namespace hdna
