#include "hdna/html/charset.hpp"

#include <iconv.h>

#include <cerrno>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hdna/error.hpp"
#include "hdna/html/tokenizer.hpp"

namespace hdna::html {
namespace {

constexpr std::string_view kReplacement = "\xEF\xBF\xBD";

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_html_whitespace(s[b])) ++b;
  while (e > b && is_html_whitespace(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

// Maps a label onto the name iconv knows it by, following the WHATWG
// aliasing for the labels that matter in practice.
std::string canonical_label(std::string_view label) {
  std::string l = to_ascii_lower(trim(label));
  if (l == "utf8" || l == "unicode-1-1-utf-8" || l == "utf-8") return "utf-8";
  if (l == "latin1" || l == "iso-8859-1" || l == "iso8859-1" || l == "ascii" ||
      l == "us-ascii" || l == "l1" || l == "cp1252" || l == "x-cp1252" ||
      l == "windows-1252") {
    return "windows-1252";
  }
  if (l == "utf-16" || l == "utf-16le" || l == "unicode") return "utf-16le";
  if (l == "utf-16be") return "utf-16be";
  if (l == "shift_jis" || l == "sjis" || l == "x-sjis" || l == "ms_kanji") {
    return "shift_jis";
  }
  if (l == "gb2312" || l == "gbk" || l == "x-gbk") return "gbk";
  return l;
}

std::string utf8_with_replacement(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    auto c = static_cast<unsigned char>(in[i]);
    std::size_t len = 0;
    std::uint32_t min = 0;
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
      ++i;
      continue;
    }
    if ((c & 0xE0) == 0xC0) {
      len = 2;
      min = 0x80;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      min = 0x800;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      min = 0x10000;
    }
    bool ok = len > 0 && i + len <= in.size();
    std::uint32_t cp = len ? c & (0x7F >> len) : 0;
    for (std::size_t k = 1; ok && k < len; ++k) {
      auto cc = static_cast<unsigned char>(in[i + k]);
      if ((cc & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (cc & 0x3F);
      }
    }
    if (ok && (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))) ok = false;
    if (ok) {
      out.append(in.substr(i, len));
      i += len;
    } else {
      out.append(kReplacement);
      ++i;
    }
  }
  return out;
}

class IconvHandle {
 public:
  explicit IconvHandle(const std::string& from)
      : cd_(iconv_open("UTF-8", from.c_str())) {}
  ~IconvHandle() {
    if (valid()) iconv_close(cd_);
  }
  IconvHandle(const IconvHandle&) = delete;
  IconvHandle& operator=(const IconvHandle&) = delete;

  bool valid() const noexcept { return cd_ != reinterpret_cast<iconv_t>(-1); }
  iconv_t get() const noexcept { return cd_; }

 private:
  iconv_t cd_;
};

std::string convert(IconvHandle& cd, std::string_view in) {
  std::string out;
  std::vector<char> buf(16 * 1024);
  char* src = const_cast<char*>(in.data());
  std::size_t src_left = in.size();
  while (src_left > 0) {
    char* dst = buf.data();
    std::size_t dst_left = buf.size();
    std::size_t rc = iconv(cd.get(), &src, &src_left, &dst, &dst_left);
    out.append(buf.data(), buf.size() - dst_left);
    if (rc == static_cast<std::size_t>(-1)) {
      if (errno == E2BIG) continue;
      // EILSEQ / EINVAL: replace one byte and resynchronise.
      out.append(kReplacement);
      ++src;
      --src_left;
      iconv(cd.get(), nullptr, nullptr, nullptr, nullptr);
    }
  }
  return out;
}

}  // namespace

bool is_valid_utf8(std::string_view bytes) {
  return utf8_with_replacement(bytes) == bytes;
}

std::optional<std::string> charset_from_content_type(std::string_view content_type) {
  std::string lower = to_ascii_lower(content_type);
  std::size_t pos = lower.find("charset");
  while (pos != std::string::npos) {
    std::size_t p = pos + 7;
    while (p < lower.size() && is_html_whitespace(lower[p])) ++p;
    if (p < lower.size() && lower[p] == '=') {
      ++p;
      while (p < lower.size() && is_html_whitespace(lower[p])) ++p;
      if (p >= lower.size()) return std::nullopt;
      char quote = lower[p];
      std::string value;
      if (quote == '"' || quote == '\'') {
        std::size_t end = lower.find(quote, p + 1);
        if (end == std::string::npos) return std::nullopt;
        value = content_type.substr(p + 1, end - p - 1);
      } else {
        std::size_t end = p;
        while (end < lower.size() && lower[end] != ';' && !is_html_whitespace(lower[end])) {
          ++end;
        }
        value = content_type.substr(p, end - p);
      }
      if (value.empty()) return std::nullopt;
      return value;
    }
    pos = lower.find("charset", pos + 7);
  }
  return std::nullopt;
}

std::optional<std::string> prescan_meta_charset(std::string_view bytes) {
  Tokenizer tokenizer(bytes.substr(0, 1024));
  for (;;) {
    Token t = tokenizer.next();
    if (t.type == Token::Type::kEof) return std::nullopt;
    if (t.type != Token::Type::kStartTag) continue;
    // Script/style bodies are not markup.
    if (t.name == "script") tokenizer.set_state(Tokenizer::State::kScriptData);
    if (t.name == "style") tokenizer.set_state(Tokenizer::State::kRawtext);
    if (t.name != "meta") continue;
    if (const std::string* cs = t.attribute("charset"); cs && !trim(*cs).empty()) {
      return trim(*cs);
    }
    const std::string* equiv = t.attribute("http-equiv");
    const std::string* content = t.attribute("content");
    if (equiv && content && to_ascii_lower(trim(*equiv)) == "content-type") {
      if (auto cs = charset_from_content_type(*content)) return cs;
    }
  }
}

std::string decode_to_utf8(const RawHtml& input) {
  std::string_view bytes = input.bytes;
  if (bytes.substr(0, 3) == "\xEF\xBB\xBF") return utf8_with_replacement(bytes.substr(3));

  std::string label;
  std::string from;
  if (bytes.substr(0, 2) == "\xFE\xFF") {
    from = "utf-16be";
    bytes.remove_prefix(2);
  } else if (bytes.substr(0, 2) == "\xFF\xFE") {
    from = "utf-16le";
    bytes.remove_prefix(2);
  } else if (input.declared_charset && !trim(*input.declared_charset).empty()) {
    label = *input.declared_charset;
    from = canonical_label(label);
  } else if (auto meta = prescan_meta_charset(bytes)) {
    label = *meta;
    from = canonical_label(label);
    // A meta declaration claiming UTF-16 cannot be true of bytes we could
    // prescan as ASCII.
    if (from == "utf-16le" || from == "utf-16be") from = "utf-8";
  } else {
    from = "utf-8";
  }

  if (from == "utf-8") return utf8_with_replacement(bytes);

  IconvHandle cd(from);
  if (!cd.valid()) {
    if (is_valid_utf8(bytes)) return std::string(bytes);
    throw Error(ErrorKind::kCharsetUndecodable,
                "unknown charset label '" + label + "' and input is not valid UTF-8");
  }
  return convert(cd, bytes);
}

}  // namespace hdna::html
