#pragma once

#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hdna/html/dom.hpp"

namespace hdna::html {

struct Token {
  enum class Type { kDoctype, kStartTag, kEndTag, kComment, kCharacter, kEof };

  Type type = Type::kEof;
  std::string name;
  std::string data;
  std::vector<Attribute> attributes;
  bool self_closing = false;

  bool force_quirks = false;
  std::optional<std::string> public_id;
  std::optional<std::string> system_id;

  const std::string* attribute(std::string_view attr) const;
};

// WHATWG tokenizer. Character references are only decoded where they can
// affect tree construction (numeric references and the two whitespace named
// references); every other named reference passes through as literal text.
class Tokenizer {
 public:
  enum class State { kData, kRcdata, kRawtext, kScriptData, kPlaintext };

  explicit Tokenizer(std::string_view input);

  Token next();

  void set_state(State state) noexcept { state_ = state; }
  // CDATA sections are only recognised while the adjusted current node is
  // in a foreign namespace.
  void set_cdata_allowed(bool allowed) noexcept { cdata_allowed_ = allowed; }

 private:
  void scan_data(std::string& text);
  void scan_text_block(std::string& text, bool char_refs);
  void scan_script(std::string& text);
  void scan_plaintext(std::string& text);

  bool at_appropriate_end_tag(std::size_t lt_pos) const;
  std::optional<Token> tag_open();
  std::optional<Token> parse_tag(bool end_tag);
  Token bogus_comment(std::size_t from);
  Token comment();
  Token doctype();
  void cdata(std::string& text);
  void char_ref(std::string& out);

  bool eof() const noexcept { return pos_ >= src_.size(); }

  std::string src_;
  std::size_t pos_ = 0;
  State state_ = State::kData;
  bool cdata_allowed_ = false;
  std::string last_start_tag_;
  std::deque<Token> pending_;
  std::string spill_;  // text produced while probing for a tag
  bool eof_emitted_ = false;
};

bool is_html_whitespace(char c) noexcept;
std::string to_ascii_lower(std::string_view s);

}  // namespace hdna::html
