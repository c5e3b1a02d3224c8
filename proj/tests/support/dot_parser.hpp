#pragma once

// Recursive-descent reader for the Graphviz DOT language, used to check that
// exported files are well-formed. Throws std::runtime_error on bad input.

#include <cctype>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hdna::testing {

struct DotGraph {
  bool directed = false;
  std::set<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
  std::map<std::string, std::map<std::string, std::string>> node_attrs;
};

class DotParser {
 public:
  explicit DotParser(std::string src) : s_(std::move(src)) {}

  DotGraph parse() {
    skip();
    if (keyword("strict")) skip();
    if (keyword("digraph")) {
      g_.directed = true;
    } else if (!keyword("graph")) {
      fail("expected graph or digraph");
    }
    skip();
    if (peek() != '{') id();
    expect('{');
    stmt_list();
    expect('}');
    skip();
    if (pos_ != s_.size()) fail("trailing input");
    return g_;
  }

 private:
  [[noreturn]] void fail(const std::string& why) {
    throw std::runtime_error("DOT parse error at " + std::to_string(pos_) + ": " + why);
  }

  void skip() {
    for (;;) {
      while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (s_.compare(pos_, 2, "//") == 0 || (pos_ < s_.size() && s_[pos_] == '#')) {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else if (s_.compare(pos_, 2, "/*") == 0) {
        auto end = s_.find("*/", pos_ + 2);
        if (end == std::string::npos) fail("unterminated comment");
        pos_ = end + 2;
      } else {
        return;
      }
    }
  }

  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool keyword(const char* kw) {
    std::size_t len = std::char_traits<char>::length(kw);
    if (s_.size() - pos_ < len) return false;
    for (std::size_t i = 0; i < len; ++i) {
      if (std::tolower(static_cast<unsigned char>(s_[pos_ + i])) != kw[i]) return false;
    }
    if (pos_ + len < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_ + len])) ||
                                   s_[pos_ + len] == '_')) {
      return false;
    }
    pos_ += len;
    return true;
  }

  std::string id() {
    skip();
    if (pos_ >= s_.size()) fail("expected ID");
    char c = s_[pos_];
    std::string out;
    if (c == '"') {
      ++pos_;
      while (pos_ < s_.size() && s_[pos_] != '"') {
        if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) {
          out.push_back(s_[pos_ + 1]);
          pos_ += 2;
          continue;
        }
        out.push_back(s_[pos_++]);
      }
      if (pos_ >= s_.size()) fail("unterminated string");
      ++pos_;
      return out;
    }
    if (c == '<') {
      int depth = 0;
      do {
        if (pos_ >= s_.size()) fail("unterminated HTML string");
        if (s_[pos_] == '<') ++depth;
        if (s_[pos_] == '>') --depth;
        out.push_back(s_[pos_++]);
      } while (depth > 0);
      return out;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.') {
      if (c == '-') out.push_back(s_[pos_++]);
      bool digits = false;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
        digits = true;
        out.push_back(s_[pos_++]);
      }
      if (!digits) fail("bad numeral");
      return out;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || static_cast<unsigned char>(c) >= 0x80) {
      while (pos_ < s_.size()) {
        unsigned char u = static_cast<unsigned char>(s_[pos_]);
        if (!(std::isalnum(u) || u == '_' || u >= 0x80)) break;
        out.push_back(s_[pos_++]);
      }
      return out;
    }
    fail("expected ID");
  }

  std::map<std::string, std::string> attr_list() {
    std::map<std::string, std::string> attrs;
    while (peek() == '[') {
      ++pos_;
      while (peek() != ']') {
        std::string k = id();
        expect('=');
        attrs[k] = id();
        if (peek() == ',' || peek() == ';') ++pos_;
      }
      ++pos_;
    }
    return attrs;
  }

  std::string node_id() {
    std::string n = id();
    if (peek() == ':') {
      ++pos_;
      id();
      if (peek() == ':') {
        ++pos_;
        id();
      }
    }
    return n;
  }

  void stmt_list() {
    while (peek() != '}') {
      if (pos_ >= s_.size()) fail("unexpected end of input");
      stmt();
      if (peek() == ';') ++pos_;
    }
  }

  std::vector<std::string> subgraph() {
    if (keyword("subgraph")) {
      if (peek() != '{') id();
    }
    std::set<std::string> outer = g_.nodes;
    expect('{');
    stmt_list();
    expect('}');
    std::vector<std::string> members;
    for (const auto& n : g_.nodes) {
      if (!outer.count(n)) members.push_back(n);
    }
    return members;
  }

  void stmt() {
    std::size_t save = pos_;
    if (keyword("graph") || keyword("node") || keyword("edge")) {
      attr_list();
      return;
    }
    pos_ = save;
    std::vector<std::string> lhs;
    if (peek() == '{' || keyword("subgraph")) {
      pos_ = save;
      lhs = subgraph();
    } else {
      std::string n = node_id();
      if (peek() == '=') {
        ++pos_;
        id();
        return;
      }
      lhs = {n};
      g_.nodes.insert(n);
    }
    bool had_edge = false;
    for (;;) {
      skip();
      const char* op = g_.directed ? "->" : "--";
      if (s_.compare(pos_, 2, op) != 0) {
        if (s_.compare(pos_, 2, g_.directed ? "--" : "->") == 0) fail("wrong edge operator");
        break;
      }
      pos_ += 2;
      std::vector<std::string> rhs;
      std::size_t at = pos_;
      if (peek() == '{' || keyword("subgraph")) {
        pos_ = at;
        rhs = subgraph();
      } else {
        rhs = {node_id()};
        g_.nodes.insert(rhs[0]);
      }
      for (const auto& a : lhs) {
        for (const auto& b : rhs) g_.edges.emplace_back(a, b);
      }
      lhs = rhs;
      had_edge = true;
    }
    auto attrs = attr_list();
    if (!had_edge && lhs.size() == 1) {
      for (auto& [k, v] : attrs) g_.node_attrs[lhs[0]][k] = v;
    }
  }

  std::string s_;
  std::size_t pos_ = 0;
  DotGraph g_;
};

inline DotGraph parse_dot(const std::string& text) { return DotParser(text).parse(); }

}  // namespace hdna::testing
