#include "hdna/html/tokenizer.hpp"

#include <algorithm>
#include <cstdint>
#include <utility>

namespace hdna::html {
namespace {

constexpr std::string_view kReplacementChar = "\xEF\xBF\xBD";

bool is_alpha(char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

char lower(char c) noexcept {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

bool starts_with_ci(std::string_view haystack, std::size_t pos,
                    std::string_view needle) {
  if (pos > haystack.size() || haystack.size() - pos < needle.size()) {
    return false;
  }
  for (std::size_t i = 0; i < needle.size(); ++i) {
    if (lower(haystack[pos + i]) != lower(needle[i])) return false;
  }
  return true;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

void append_name_char(std::string& out, char c) {
  if (c == '\0') {
    out.append(kReplacementChar);
  } else {
    out.push_back(lower(c));
  }
}

std::string normalize_newlines(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] == '\r') {
      out.push_back('\n');
      if (i + 1 < in.size() && in[i + 1] == '\n') ++i;
    } else {
      out.push_back(in[i]);
    }
  }
  return out;
}

}  // namespace

bool is_html_whitespace(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\f' || c == '\r';
}

std::string to_ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = lower(c);
  return out;
}

const std::string* Token::attribute(std::string_view attr) const {
  for (const auto& a : attributes) {
    if (a.name == attr) return &a.value;
  }
  return nullptr;
}

Tokenizer::Tokenizer(std::string_view input) : src_(normalize_newlines(input)) {}

Token Tokenizer::next() {
  if (!pending_.empty()) {
    Token t = std::move(pending_.front());
    pending_.pop_front();
    return t;
  }
  if (eof_emitted_) return Token{};

  std::string text;
  switch (state_) {
    case State::kData:
      scan_data(text);
      break;
    case State::kRcdata:
      scan_text_block(text, true);
      break;
    case State::kRawtext:
      scan_text_block(text, false);
      break;
    case State::kScriptData:
      scan_script(text);
      break;
    case State::kPlaintext:
      scan_plaintext(text);
      break;
  }

  if (pending_.empty() && eof()) {
    pending_.push_back(Token{});
    eof_emitted_ = true;
  }
  if (!text.empty()) {
    Token t;
    t.type = Token::Type::kCharacter;
    t.data = std::move(text);
    return t;
  }
  Token t = std::move(pending_.front());
  pending_.pop_front();
  return t;
}

void Tokenizer::scan_data(std::string& text) {
  while (!eof()) {
    char c = src_[pos_];
    if (c == '<') {
      if (auto tok = tag_open()) {
        pending_.push_back(std::move(*tok));
        return;
      }
      // tag_open consumed something that turned out to be text; pick up any
      // CDATA payload or literal '<' it left behind.
      if (!spill_.empty()) {
        text += spill_;
        spill_.clear();
      }
      continue;
    }
    if (c == '&') {
      char_ref(text);
      continue;
    }
    std::size_t stop = src_.find_first_of("<&", pos_);
    if (stop == std::string::npos) stop = src_.size();
    text.append(src_, pos_, stop - pos_);
    pos_ = stop;
  }
}

bool Tokenizer::at_appropriate_end_tag(std::size_t lt_pos) const {
  if (last_start_tag_.empty()) return false;
  std::size_t p = lt_pos + 1;
  if (p >= src_.size() || src_[p] != '/') return false;
  ++p;
  if (!starts_with_ci(src_, p, last_start_tag_)) return false;
  p += last_start_tag_.size();
  if (p >= src_.size()) return false;
  char c = src_[p];
  return is_html_whitespace(c) || c == '/' || c == '>';
}

void Tokenizer::scan_text_block(std::string& text, bool char_refs) {
  while (!eof()) {
    char c = src_[pos_];
    if (c == '<' && at_appropriate_end_tag(pos_)) {
      pos_ += 2;
      state_ = State::kData;
      if (auto tok = parse_tag(true)) pending_.push_back(std::move(*tok));
      return;
    }
    if (c == '&' && char_refs) {
      char_ref(text);
      continue;
    }
    if (c == '\0') {
      text.append(kReplacementChar);
    } else {
      text.push_back(c);
    }
    ++pos_;
  }
}

void Tokenizer::scan_plaintext(std::string& text) {
  for (; !eof(); ++pos_) {
    if (src_[pos_] == '\0') {
      text.append(kReplacementChar);
    } else {
      text.push_back(src_[pos_]);
    }
  }
}

// Script data with the escape / double-escape sub-states. All payload is
// emitted as text; the sub-state only decides where the element ends.
void Tokenizer::scan_script(std::string& text) {
  enum class Sub {
    kNormal,
    kEscaped,
    kEscapedDash,
    kEscapedDashDash,
    kDouble,
    kDoubleDash,
    kDoubleDashDash,
  };
  Sub sub = Sub::kNormal;

  auto read_word = [&](std::size_t from) {
    std::size_t p = from;
    while (p < src_.size() && is_alpha(src_[p])) ++p;
    return p;
  };
  auto word_is_script = [&](std::size_t from, std::size_t to) {
    if (to >= src_.size()) return false;
    char c = src_[to];
    if (!(is_html_whitespace(c) || c == '/' || c == '>')) return false;
    return to - from == 6 && starts_with_ci(src_, from, "script");
  };

  while (!eof()) {
    char c = src_[pos_];
    if (c == '\0') {
      text.append(kReplacementChar);
      ++pos_;
      continue;
    }
    switch (sub) {
      case Sub::kNormal:
        if (c == '<') {
          if (at_appropriate_end_tag(pos_)) {
            pos_ += 2;
            state_ = State::kData;
            if (auto tok = parse_tag(true)) pending_.push_back(std::move(*tok));
            return;
          }
          if (src_.compare(pos_, 4, "<!--") == 0) {
            text.append("<!--");
            pos_ += 4;
            sub = Sub::kEscapedDashDash;
            continue;
          }
        }
        break;
      case Sub::kEscaped:
      case Sub::kEscapedDash:
      case Sub::kEscapedDashDash:
        if (c == '-') {
          sub = sub == Sub::kEscaped ? Sub::kEscapedDash : Sub::kEscapedDashDash;
        } else if (c == '<') {
          if (at_appropriate_end_tag(pos_)) {
            pos_ += 2;
            state_ = State::kData;
            if (auto tok = parse_tag(true)) pending_.push_back(std::move(*tok));
            return;
          }
          sub = Sub::kEscaped;
          if (pos_ + 1 < src_.size() && is_alpha(src_[pos_ + 1])) {
            std::size_t end = read_word(pos_ + 1);
            if (word_is_script(pos_ + 1, end)) sub = Sub::kDouble;
            text.append(src_, pos_, end - pos_);
            pos_ = end;
            continue;
          }
        } else if (c == '>' && sub == Sub::kEscapedDashDash) {
          sub = Sub::kNormal;
        } else {
          sub = Sub::kEscaped;
        }
        break;
      case Sub::kDouble:
      case Sub::kDoubleDash:
      case Sub::kDoubleDashDash:
        if (c == '-') {
          sub = sub == Sub::kDouble ? Sub::kDoubleDash : Sub::kDoubleDashDash;
        } else if (c == '<') {
          sub = Sub::kDouble;
          if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
            std::size_t end = read_word(pos_ + 2);
            if (word_is_script(pos_ + 2, end)) sub = Sub::kEscaped;
            text.append(src_, pos_, end - pos_);
            pos_ = end;
            continue;
          }
        } else if (c == '>' && sub == Sub::kDoubleDashDash) {
          sub = Sub::kNormal;
        } else {
          sub = Sub::kDouble;
        }
        break;
    }
    text.push_back(c);
    ++pos_;
  }
}

std::optional<Token> Tokenizer::tag_open() {
  // pos_ is at '<'.
  if (pos_ + 1 >= src_.size()) {
    spill_.push_back('<');
    ++pos_;
    return std::nullopt;
  }
  char c = src_[pos_ + 1];
  if (c == '!') {
    pos_ += 2;
    if (src_.compare(pos_, 2, "--") == 0) {
      pos_ += 2;
      return comment();
    }
    if (starts_with_ci(src_, pos_, "doctype")) {
      pos_ += 7;
      return doctype();
    }
    if (cdata_allowed_ && src_.compare(pos_, 7, "[CDATA[") == 0) {
      pos_ += 7;
      cdata(spill_);
      return std::nullopt;
    }
    return bogus_comment(pos_);
  }
  if (c == '/') {
    if (pos_ + 2 >= src_.size()) {
      spill_.append("</");
      pos_ += 2;
      return std::nullopt;
    }
    char d = src_[pos_ + 2];
    if (is_alpha(d)) {
      pos_ += 2;
      return parse_tag(true);
    }
    if (d == '>') {
      pos_ += 3;
      return std::nullopt;
    }
    return bogus_comment(pos_ + 2);
  }
  if (is_alpha(c)) {
    ++pos_;
    return parse_tag(false);
  }
  if (c == '?') return bogus_comment(pos_ + 1);
  spill_.push_back('<');
  ++pos_;
  return std::nullopt;
}

std::optional<Token> Tokenizer::parse_tag(bool end_tag) {
  Token tok;
  tok.type = end_tag ? Token::Type::kEndTag : Token::Type::kStartTag;

  enum class St {
    kName,
    kBeforeAttrName,
    kAttrName,
    kAfterAttrName,
    kBeforeAttrValue,
    kValueDq,
    kValueSq,
    kValueUnquoted,
    kAfterValueQuoted,
    kSelfClosing,
  };
  St st = St::kName;
  Attribute attr;
  bool have_attr = false;

  auto commit_attr = [&] {
    if (!have_attr) return;
    bool dup = std::any_of(tok.attributes.begin(), tok.attributes.end(),
                           [&](const Attribute& a) { return a.name == attr.name; });
    if (!dup) tok.attributes.push_back(std::move(attr));
    attr = Attribute{};
    have_attr = false;
  };
  auto emit = [&]() -> Token {
    commit_attr();
    if (!end_tag) {
      last_start_tag_ = tok.name;
    } else {
      tok.attributes.clear();
      tok.self_closing = false;
    }
    return std::move(tok);
  };

  while (!eof()) {
    char c = src_[pos_++];
    switch (st) {
      case St::kName:
        if (is_html_whitespace(c)) {
          st = St::kBeforeAttrName;
        } else if (c == '/') {
          st = St::kSelfClosing;
        } else if (c == '>') {
          return emit();
        } else {
          append_name_char(tok.name, c);
        }
        break;
      case St::kBeforeAttrName:
        if (is_html_whitespace(c)) break;
        if (c == '/' || c == '>') {
          --pos_;
          st = St::kAfterAttrName;
          break;
        }
        commit_attr();
        have_attr = true;
        if (c == '=') {
          attr.name.push_back('=');
        } else {
          --pos_;
        }
        st = St::kAttrName;
        break;
      case St::kAttrName:
        if (is_html_whitespace(c) || c == '/' || c == '>') {
          --pos_;
          st = St::kAfterAttrName;
        } else if (c == '=') {
          st = St::kBeforeAttrValue;
        } else {
          append_name_char(attr.name, c);
        }
        break;
      case St::kAfterAttrName:
        if (is_html_whitespace(c)) break;
        if (c == '/') {
          st = St::kSelfClosing;
        } else if (c == '=') {
          st = St::kBeforeAttrValue;
        } else if (c == '>') {
          return emit();
        } else {
          commit_attr();
          have_attr = true;
          --pos_;
          st = St::kAttrName;
        }
        break;
      case St::kBeforeAttrValue:
        if (is_html_whitespace(c)) break;
        if (c == '"') {
          st = St::kValueDq;
        } else if (c == '\'') {
          st = St::kValueSq;
        } else if (c == '>') {
          return emit();
        } else {
          --pos_;
          st = St::kValueUnquoted;
        }
        break;
      case St::kValueDq:
      case St::kValueSq:
        if ((c == '"' && st == St::kValueDq) ||
            (c == '\'' && st == St::kValueSq)) {
          st = St::kAfterValueQuoted;
        } else if (c == '&') {
          --pos_;
          char_ref(attr.value);
        } else if (c == '\0') {
          attr.value.append(kReplacementChar);
        } else {
          attr.value.push_back(c);
        }
        break;
      case St::kValueUnquoted:
        if (is_html_whitespace(c)) {
          st = St::kBeforeAttrName;
        } else if (c == '>') {
          return emit();
        } else if (c == '&') {
          --pos_;
          char_ref(attr.value);
        } else if (c == '\0') {
          attr.value.append(kReplacementChar);
        } else {
          attr.value.push_back(c);
        }
        break;
      case St::kAfterValueQuoted:
        if (is_html_whitespace(c)) {
          st = St::kBeforeAttrName;
        } else if (c == '/') {
          st = St::kSelfClosing;
        } else if (c == '>') {
          return emit();
        } else {
          --pos_;
          st = St::kBeforeAttrName;
        }
        break;
      case St::kSelfClosing:
        if (c == '>') {
          tok.self_closing = true;
          return emit();
        }
        --pos_;
        st = St::kBeforeAttrName;
        break;
    }
  }
  // EOF inside a tag: the tag is dropped.
  return std::nullopt;
}

Token Tokenizer::bogus_comment(std::size_t from) {
  Token tok;
  tok.type = Token::Type::kComment;
  std::size_t end = src_.find('>', from);
  if (end == std::string::npos) {
    tok.data = src_.substr(from);
    pos_ = src_.size();
  } else {
    tok.data = src_.substr(from, end - from);
    pos_ = end + 1;
  }
  return tok;
}

Token Tokenizer::comment() {
  // pos_ is just past "<!--".
  Token tok;
  tok.type = Token::Type::kComment;
  if (src_.compare(pos_, 1, ">") == 0) {
    pos_ += 1;
    return tok;
  }
  if (src_.compare(pos_, 2, "->") == 0) {
    pos_ += 2;
    return tok;
  }
  std::size_t best = std::string::npos;
  std::size_t skip = 0;
  std::size_t a = src_.find("-->", pos_);
  std::size_t b = src_.find("--!>", pos_);
  if (a != std::string::npos) {
    best = a;
    skip = 3;
  }
  if (b != std::string::npos && b < best) {
    best = b;
    skip = 4;
  }
  if (best == std::string::npos) {
    tok.data = src_.substr(pos_);
    pos_ = src_.size();
  } else {
    tok.data = src_.substr(pos_, best - pos_);
    pos_ = best + skip;
  }
  return tok;
}

Token Tokenizer::doctype() {
  // pos_ is just past "<!DOCTYPE".
  Token tok;
  tok.type = Token::Type::kDoctype;

  auto skip_ws = [&] {
    while (!eof() && is_html_whitespace(src_[pos_])) ++pos_;
  };
  auto bogus = [&](bool quirks) -> Token {
    if (quirks) tok.force_quirks = true;
    std::size_t end = src_.find('>', pos_);
    pos_ = end == std::string::npos ? src_.size() : end + 1;
    return std::move(tok);
  };
  auto quoted = [&](std::optional<std::string>& out) -> bool {
    // Returns true when the doctype token was completed by an abrupt '>'.
    char quote = src_[pos_++];
    out.emplace();
    while (!eof()) {
      char c = src_[pos_++];
      if (c == quote) return false;
      if (c == '>') {
        tok.force_quirks = true;
        return true;
      }
      if (c == '\0') {
        out->append(kReplacementChar);
      } else {
        out->push_back(c);
      }
    }
    tok.force_quirks = true;
    return true;
  };

  skip_ws();
  if (eof()) {
    tok.force_quirks = true;
    return tok;
  }
  if (src_[pos_] == '>') {
    ++pos_;
    tok.force_quirks = true;
    return tok;
  }
  while (!eof() && !is_html_whitespace(src_[pos_]) && src_[pos_] != '>') {
    append_name_char(tok.name, src_[pos_++]);
  }
  skip_ws();
  if (eof()) {
    tok.force_quirks = true;
    return tok;
  }
  if (src_[pos_] == '>') {
    ++pos_;
    return tok;
  }

  bool is_public = starts_with_ci(src_, pos_, "public");
  bool is_system = !is_public && starts_with_ci(src_, pos_, "system");
  if (!is_public && !is_system) return bogus(true);
  pos_ += 6;
  skip_ws();
  if (eof()) {
    tok.force_quirks = true;
    return tok;
  }
  char c = src_[pos_];
  if (c == '>') {
    ++pos_;
    tok.force_quirks = true;
    return tok;
  }
  if (c != '"' && c != '\'') return bogus(true);
  if (quoted(is_public ? tok.public_id : tok.system_id)) return tok;

  if (is_public) {
    skip_ws();
    if (eof()) {
      tok.force_quirks = true;
      return tok;
    }
    c = src_[pos_];
    if (c == '>') {
      ++pos_;
      return tok;
    }
    if (c != '"' && c != '\'') return bogus(true);
    if (quoted(tok.system_id)) return tok;
  }

  skip_ws();
  if (eof()) {
    tok.force_quirks = true;
    return tok;
  }
  if (src_[pos_] == '>') {
    ++pos_;
    return tok;
  }
  return bogus(false);
}

void Tokenizer::cdata(std::string& text) {
  std::size_t end = src_.find("]]>", pos_);
  if (end == std::string::npos) {
    text.append(src_, pos_, std::string::npos);
    pos_ = src_.size();
  } else {
    text.append(src_, pos_, end - pos_);
    pos_ = end + 3;
  }
}

void Tokenizer::char_ref(std::string& out) {
  // pos_ is at '&'.
  std::size_t p = pos_ + 1;
  if (p < src_.size() && src_[p] == '#') {
    ++p;
    bool hex = p < src_.size() && (src_[p] == 'x' || src_[p] == 'X');
    if (hex) ++p;
    std::size_t digits_start = p;
    std::uint64_t value = 0;
    while (p < src_.size()) {
      char c = src_[p];
      int digit = -1;
      if (c >= '0' && c <= '9') {
        digit = c - '0';
      } else if (hex && c >= 'a' && c <= 'f') {
        digit = c - 'a' + 10;
      } else if (hex && c >= 'A' && c <= 'F') {
        digit = c - 'A' + 10;
      }
      if (digit < 0) break;
      value = std::min<std::uint64_t>(value * (hex ? 16 : 10) + digit, 0x110000);
      ++p;
    }
    if (p == digits_start) {
      out.push_back('&');
      ++pos_;
      return;
    }
    if (p < src_.size() && src_[p] == ';') ++p;
    pos_ = p;
    if (value == 0 || value > 0x10FFFF || (value >= 0xD800 && value <= 0xDFFF)) {
      out.append(kReplacementChar);
    } else {
      append_utf8(out, static_cast<std::uint32_t>(value));
    }
    return;
  }
  if (src_.compare(p, 4, "Tab;") == 0) {
    out.push_back('\t');
    pos_ = p + 4;
    return;
  }
  if (src_.compare(p, 8, "NewLine;") == 0) {
    out.push_back('\n');
    pos_ = p + 8;
    return;
  }
  out.push_back('&');
  ++pos_;
}

}  // namespace hdna::html
