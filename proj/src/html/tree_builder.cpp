#include <algorithm>
#include <array>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hdna/html/parser.hpp"
#include "hdna/html/tokenizer.hpp"

namespace hdna::html {
namespace {

using Names = std::initializer_list<std::string_view>;

bool one_of(std::string_view name, Names names) {
  return std::find(names.begin(), names.end(), name) != names.end();
}

bool all_whitespace(std::string_view s) {
  return std::all_of(s.begin(), s.end(), is_html_whitespace);
}

std::string take_leading_whitespace(std::string& data) {
  std::size_t n = 0;
  while (n < data.size() && is_html_whitespace(data[n])) ++n;
  std::string ws = data.substr(0, n);
  data.erase(0, n);
  return ws;
}

std::string only_whitespace(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (is_html_whitespace(c)) out.push_back(c);
  }
  return out;
}

void remove_nulls(std::string& s) {
  s.erase(std::remove(s.begin(), s.end(), '\0'), s.end());
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() &&
         to_ascii_lower(s.substr(0, prefix.size())) == to_ascii_lower(prefix);
}

constexpr std::array<std::string_view, 55> kQuirkyPublicPrefixes = {
    "+//silmaril//dtd html pro v0r11 19970101//",
    "-//as//dtd html 3.0 aswedit + extensions//",
    "-//advasoft ltd//dtd html 3.0 aswedit + extensions//",
    "-//ietf//dtd html 2.0 level 1//",
    "-//ietf//dtd html 2.0 level 2//",
    "-//ietf//dtd html 2.0 strict level 1//",
    "-//ietf//dtd html 2.0 strict level 2//",
    "-//ietf//dtd html 2.0 strict//",
    "-//ietf//dtd html 2.0//",
    "-//ietf//dtd html 2.1e//",
    "-//ietf//dtd html 3.0//",
    "-//ietf//dtd html 3.2 final//",
    "-//ietf//dtd html 3.2//",
    "-//ietf//dtd html 3//",
    "-//ietf//dtd html level 0//",
    "-//ietf//dtd html level 1//",
    "-//ietf//dtd html level 2//",
    "-//ietf//dtd html level 3//",
    "-//ietf//dtd html strict level 0//",
    "-//ietf//dtd html strict level 1//",
    "-//ietf//dtd html strict level 2//",
    "-//ietf//dtd html strict level 3//",
    "-//ietf//dtd html strict//",
    "-//ietf//dtd html//",
    "-//metrius//dtd metrius presentational//",
    "-//microsoft//dtd internet explorer 2.0 html strict//",
    "-//microsoft//dtd internet explorer 2.0 html//",
    "-//microsoft//dtd internet explorer 2.0 tables//",
    "-//microsoft//dtd internet explorer 3.0 html strict//",
    "-//microsoft//dtd internet explorer 3.0 html//",
    "-//microsoft//dtd internet explorer 3.0 tables//",
    "-//netscape comm. corp.//dtd html//",
    "-//netscape comm. corp.//dtd strict html//",
    "-//o'reilly and associates//dtd html 2.0//",
    "-//o'reilly and associates//dtd html extended 1.0//",
    "-//o'reilly and associates//dtd html extended relaxed 1.0//",
    "-//sq//dtd html 2.0 hotmetal + extensions//",
    "-//softquad software//dtd hotmetal pro 6.0::19990601::extensions to html 4.0//",
    "-//softquad//dtd hotmetal pro 4.0::19971010::extensions to html 4.0//",
    "-//spyglass//dtd html 2.0 extended//",
    "-//sun microsystems corp.//dtd hotjava html//",
    "-//sun microsystems corp.//dtd hotjava strict html//",
    "-//w3c//dtd html 3 1995-03-24//",
    "-//w3c//dtd html 3.2 draft//",
    "-//w3c//dtd html 3.2 final//",
    "-//w3c//dtd html 3.2//",
    "-//w3c//dtd html 3.2s draft//",
    "-//w3c//dtd html 4.0 frameset//",
    "-//w3c//dtd html 4.0 transitional//",
    "-//w3c//dtd html experimental 19960712//",
    "-//w3c//dtd html experimental 970421//",
    "-//w3c//dtd w3 html//",
    "-//w3o//dtd w3 html 3.0//",
    "-//webtechs//dtd mozilla html 2.0//",
    "-//webtechs//dtd mozilla html//",
};

bool doctype_is_quirky(const Token& t) {
  if (t.force_quirks || t.name != "html") return true;
  if (t.public_id) {
    std::string pub = to_ascii_lower(*t.public_id);
    if (pub == "-//w3o//dtd w3 html strict 3.0//en//" ||
        pub == "-/w3c/dtd html 4.0 transitional/en" || pub == "html") {
      return true;
    }
    for (auto prefix : kQuirkyPublicPrefixes) {
      if (starts_with_ci(pub, prefix)) return true;
    }
    if (!t.system_id && (starts_with_ci(pub, "-//w3c//dtd html 4.01 frameset//") ||
                         starts_with_ci(pub, "-//w3c//dtd html 4.01 transitional//"))) {
      return true;
    }
  }
  if (t.system_id &&
      to_ascii_lower(*t.system_id) ==
          "http://www.ibm.com/data/dtd/v11/ibmxhtml1-transitional.dtd") {
    return true;
  }
  return false;
}

enum class Mode {
  kInitial,
  kBeforeHtml,
  kBeforeHead,
  kInHead,
  kInHeadNoscript,
  kAfterHead,
  kInBody,
  kText,
  kInTable,
  kInTableText,
  kInCaption,
  kInColumnGroup,
  kInTableBody,
  kInRow,
  kInCell,
  kInSelect,
  kInSelectInTable,
  kInTemplate,
  kAfterBody,
  kInFrameset,
  kAfterFrameset,
  kAfterAfterBody,
  kAfterAfterFrameset,
};

enum class Scope { kDefault, kListItem, kButton, kTable, kSelect };

using Type = Token::Type;

class TreeBuilder {
 public:
  TreeBuilder(std::string_view input, const ParseOptions& options)
      : tokenizer_(input), options_(options) {}

  Document run() {
    for (;;) {
      tokenizer_.set_cdata_allowed(!open_.empty() &&
                                   node(current()).ns != Namespace::kHtml);
      Token t = tokenizer_.next();
      if (skip_newline_) {
        skip_newline_ = false;
        if (t.type == Type::kCharacter && !t.data.empty() && t.data[0] == '\n') {
          t.data.erase(0, 1);
          if (t.data.empty()) continue;
        }
      }
      dispatch(t);
      if (t.type == Type::kEof) break;
    }
    return std::move(doc_);
  }

 private:
  // ---- node helpers -------------------------------------------------------

  const Node& node(NodeId id) const { return doc_.node(id); }
  NodeId current() const { return open_.back(); }

  bool is_html(NodeId id, std::string_view name) const {
    const Node& n = node(id);
    return n.ns == Namespace::kHtml && n.name == name;
  }
  bool is_html_in(NodeId id, Names names) const {
    const Node& n = node(id);
    return n.ns == Namespace::kHtml && one_of(n.name, names);
  }

  bool is_special(NodeId id) const {
    const Node& n = node(id);
    switch (n.ns) {
      case Namespace::kHtml:
        return one_of(
            n.name,
            {"address", "applet",   "area",     "article",  "aside",     "base",
             "basefont", "bgsound", "blockquote", "body",   "br",        "button",
             "caption", "center",   "col",      "colgroup", "dd",        "details",
             "dir",     "div",      "dl",       "dt",       "embed",     "fieldset",
             "figcaption", "figure", "footer",  "form",     "frame",     "frameset",
             "h1",      "h2",       "h3",       "h4",       "h5",        "h6",
             "head",    "header",   "hgroup",   "hr",       "html",      "iframe",
             "img",     "input",    "keygen",   "li",       "link",      "listing",
             "main",    "marquee",  "menu",     "meta",     "nav",       "noembed",
             "noframes", "noscript", "object",  "ol",       "p",         "param",
             "plaintext", "pre",    "script",   "search",   "section",   "select",
             "source",  "style",    "summary",  "table",    "tbody",     "td",
             "template", "textarea", "tfoot",   "th",       "thead",     "title",
             "tr",      "track",    "ul",       "wbr",      "xmp"});
      case Namespace::kMathMl:
        return one_of(n.name, {"mi", "mo", "mn", "ms", "mtext", "annotation-xml"});
      case Namespace::kSvg:
        return one_of(n.name, {"foreignobject", "desc", "title"});
    }
    return false;
  }

  bool is_mathml_text_integration_point(NodeId id) const {
    const Node& n = node(id);
    return n.ns == Namespace::kMathMl &&
           one_of(n.name, {"mi", "mo", "mn", "ms", "mtext"});
  }

  bool is_html_integration_point(NodeId id) const {
    const Node& n = node(id);
    if (n.ns == Namespace::kSvg) {
      return one_of(n.name, {"foreignobject", "desc", "title"});
    }
    if (n.ns == Namespace::kMathMl && n.name == "annotation-xml") {
      for (const auto& a : n.attributes) {
        if (a.name == "encoding") {
          std::string enc = to_ascii_lower(a.value);
          return enc == "text/html" || enc == "application/xhtml+xml";
        }
      }
    }
    return false;
  }

  bool on_stack(NodeId id) const {
    return std::find(open_.begin(), open_.end(), id) != open_.end();
  }

  bool template_on_stack() const {
    return std::any_of(open_.begin(), open_.end(),
                       [&](NodeId id) { return is_html(id, "template"); });
  }

  // ---- scopes -------------------------------------------------------------

  bool is_scope_boundary(NodeId id, Scope scope) const {
    const Node& n = node(id);
    if (scope == Scope::kSelect) {
      return !(n.ns == Namespace::kHtml && one_of(n.name, {"optgroup", "option"}));
    }
    if (scope == Scope::kTable) {
      return n.ns == Namespace::kHtml && one_of(n.name, {"html", "table", "template"});
    }
    switch (n.ns) {
      case Namespace::kHtml:
        if (one_of(n.name, {"applet", "caption", "html", "table", "td", "th",
                            "marquee", "object", "template"})) {
          return true;
        }
        if (scope == Scope::kListItem && one_of(n.name, {"ol", "ul"})) return true;
        if (scope == Scope::kButton && n.name == "button") return true;
        return false;
      case Namespace::kMathMl:
        return one_of(n.name, {"mi", "mo", "mn", "ms", "mtext", "annotation-xml"});
      case Namespace::kSvg:
        return one_of(n.name, {"foreignobject", "desc", "title"});
    }
    return false;
  }

  bool in_scope(std::string_view name, Scope scope = Scope::kDefault) const {
    for (auto it = open_.rbegin(); it != open_.rend(); ++it) {
      if (is_html(*it, name)) return true;
      if (is_scope_boundary(*it, scope)) return false;
    }
    return false;
  }

  bool in_scope_any(Names names, Scope scope = Scope::kDefault) const {
    for (auto it = open_.rbegin(); it != open_.rend(); ++it) {
      if (is_html_in(*it, names)) return true;
      if (is_scope_boundary(*it, scope)) return false;
    }
    return false;
  }

  bool node_in_scope(NodeId target) const {
    for (auto it = open_.rbegin(); it != open_.rend(); ++it) {
      if (*it == target) return true;
      if (is_scope_boundary(*it, Scope::kDefault)) return false;
    }
    return false;
  }

  // ---- stack manipulation -------------------------------------------------

  void pop_until(std::string_view name) {
    while (!open_.empty()) {
      NodeId top = current();
      open_.pop_back();
      if (is_html(top, name)) return;
    }
  }

  void pop_until_any(Names names) {
    while (!open_.empty()) {
      NodeId top = current();
      open_.pop_back();
      if (is_html_in(top, names)) return;
    }
  }

  void generate_implied_end_tags(std::string_view except = {}) {
    while (!open_.empty()) {
      const Node& n = node(current());
      if (n.ns != Namespace::kHtml || n.name == except ||
          !one_of(n.name, {"dd", "dt", "li", "optgroup", "option", "p", "rb",
                           "rp", "rt", "rtc"})) {
        return;
      }
      open_.pop_back();
    }
  }

  void generate_all_implied_end_tags() {
    while (!open_.empty() &&
           is_html_in(current(),
                      {"caption", "colgroup", "dd", "dt", "li", "optgroup", "option",
                       "p", "rb", "rp", "rt", "rtc", "tbody", "td", "tfoot", "th",
                       "thead", "tr"})) {
      open_.pop_back();
    }
  }

  void close_p() {
    generate_implied_end_tags("p");
    pop_until("p");
  }

  void close_p_if_in_button_scope() {
    if (in_scope("p", Scope::kButton)) close_p();
  }

  void clear_stack_to_context(Names names) {
    while (!open_.empty() && !is_html_in(current(), names)) open_.pop_back();
  }
  void clear_to_table_context() { clear_stack_to_context({"table", "template", "html"}); }
  void clear_to_table_body_context() {
    clear_stack_to_context({"tbody", "tfoot", "thead", "template", "html"});
  }
  void clear_to_row_context() { clear_stack_to_context({"tr", "template", "html"}); }

  // ---- insertion ----------------------------------------------------------

  struct Place {
    NodeId parent;
    NodeId before;
  };

  Place appropriate_place(NodeId override_target = kNoNode) const {
    NodeId target = override_target == kNoNode ? current() : override_target;
    if (foster_parenting_ &&
        is_html_in(target, {"table", "tbody", "tfoot", "thead", "tr"})) {
      int last_template = -1;
      int last_table = -1;
      for (int i = static_cast<int>(open_.size()) - 1; i >= 0; --i) {
        if (last_template < 0 && is_html(open_[i], "template")) last_template = i;
        if (last_table < 0 && is_html(open_[i], "table")) last_table = i;
      }
      if (last_template >= 0 && (last_table < 0 || last_template > last_table)) {
        return {open_[last_template], kNoNode};
      }
      if (last_table < 0) return {open_.front(), kNoNode};
      NodeId table = open_[last_table];
      if (node(table).parent != kNoNode) return {node(table).parent, table};
      return {open_[last_table - 1], kNoNode};
    }
    return {target, kNoNode};
  }

  NodeId create_element(const Token& t, Namespace ns) {
    NodeId id = doc_.create(NodeKind::kElement, t.name, ns);
    doc_.node(id).attributes = t.attributes;
    return id;
  }

  Token token_for(NodeId id) const {
    Token t;
    t.type = Type::kStartTag;
    t.name = node(id).name;
    t.attributes = node(id).attributes;
    return t;
  }

  NodeId insert_element(const Token& t, Namespace ns = Namespace::kHtml) {
    NodeId id = create_element(t, ns);
    Place place = appropriate_place();
    doc_.insert_before(place.parent, id, place.before);
    open_.push_back(id);
    return id;
  }

  NodeId insert_element_named(std::string_view name) {
    Token t;
    t.type = Type::kStartTag;
    t.name = std::string(name);
    return insert_element(t);
  }

  void insert_void(const Token& t) {
    insert_element(t);
    open_.pop_back();
  }

  void insert_comment(const Token& t, NodeId parent = kNoNode) {
    NodeId id = doc_.create(NodeKind::kComment);
    doc_.node(id).data = t.data;
    if (parent != kNoNode) {
      doc_.append_child(parent, id);
      return;
    }
    Place place = appropriate_place();
    doc_.insert_before(place.parent, id, place.before);
  }

  void insert_characters(std::string_view data) {
    if (data.empty()) return;
    Place place = appropriate_place();
    if (node(place.parent).kind == NodeKind::kDocument) return;
    const auto& kids = node(place.parent).children;
    NodeId prev = kNoNode;
    if (place.before == kNoNode) {
      if (!kids.empty()) prev = kids.back();
    } else {
      auto it = std::find(kids.begin(), kids.end(), place.before);
      if (it != kids.begin()) prev = *(it - 1);
    }
    if (prev != kNoNode && node(prev).kind == NodeKind::kText) {
      doc_.node(prev).data.append(data);
      return;
    }
    NodeId id = doc_.create(NodeKind::kText);
    doc_.node(id).data = std::string(data);
    doc_.insert_before(place.parent, id, place.before);
  }

  void parse_generic_text(const Token& t, Tokenizer::State state) {
    insert_element(t);
    tokenizer_.set_state(state);
    original_mode_ = mode_;
    mode_ = Mode::kText;
  }

  // ---- active formatting elements ----------------------------------------

  static constexpr NodeId kMarker = kNoNode;

  void push_formatting(NodeId id) {
    const Node& n = node(id);
    int same = 0;
    int earliest = -1;
    for (int i = static_cast<int>(afe_.size()) - 1; i >= 0; --i) {
      if (afe_[i] == kMarker) break;
      const Node& m = node(afe_[i]);
      if (m.name == n.name && m.ns == n.ns &&
          m.attributes.size() == n.attributes.size() &&
          std::all_of(n.attributes.begin(), n.attributes.end(), [&](const Attribute& a) {
            return std::find(m.attributes.begin(), m.attributes.end(), a) !=
                   m.attributes.end();
          })) {
        ++same;
        earliest = i;
      }
    }
    if (same >= 3) afe_.erase(afe_.begin() + earliest);
    afe_.push_back(id);
  }

  void clear_formatting_to_marker() {
    while (!afe_.empty()) {
      NodeId e = afe_.back();
      afe_.pop_back();
      if (e == kMarker) return;
    }
  }

  void reconstruct_formatting() {
    if (afe_.empty()) return;
    std::size_t i = afe_.size() - 1;
    if (afe_[i] == kMarker || on_stack(afe_[i])) return;
    while (i > 0) {
      --i;
      if (afe_[i] == kMarker || on_stack(afe_[i])) {
        ++i;
        break;
      }
    }
    for (; i < afe_.size(); ++i) {
      afe_[i] = insert_element(token_for(afe_[i]));
    }
  }

  // Returns false when the token should be handled as "any other end tag".
  bool adoption_agency(const std::string& subject) {
    NodeId cur = current();
    if (is_html(cur, subject) &&
        std::find(afe_.begin(), afe_.end(), cur) == afe_.end()) {
      open_.pop_back();
      return true;
    }
    for (int outer = 0; outer < 8; ++outer) {
      int fe_afe = -1;
      for (int i = static_cast<int>(afe_.size()) - 1; i >= 0; --i) {
        if (afe_[i] == kMarker) break;
        if (is_html(afe_[i], subject)) {
          fe_afe = i;
          break;
        }
      }
      if (fe_afe < 0) return false;
      NodeId fe = afe_[fe_afe];
      auto fe_it = std::find(open_.begin(), open_.end(), fe);
      if (fe_it == open_.end()) {
        afe_.erase(afe_.begin() + fe_afe);
        return true;
      }
      if (!node_in_scope(fe)) return true;
      std::size_t fe_stack = static_cast<std::size_t>(fe_it - open_.begin());

      std::size_t fb_stack = 0;
      for (std::size_t i = fe_stack + 1; i < open_.size(); ++i) {
        if (is_special(open_[i])) {
          fb_stack = i;
          break;
        }
      }
      if (fb_stack == 0) {
        open_.resize(fe_stack);
        afe_.erase(afe_.begin() + fe_afe);
        return true;
      }
      NodeId furthest = open_[fb_stack];
      NodeId common = open_[fe_stack - 1];
      std::size_t bookmark = static_cast<std::size_t>(fe_afe);
      NodeId last = furthest;
      std::size_t idx = fb_stack;
      for (int inner = 1;; ++inner) {
        --idx;
        NodeId n = open_[idx];
        if (n == fe) break;
        auto afe_it = std::find(afe_.begin(), afe_.end(), n);
        if (inner > 3 && afe_it != afe_.end()) {
          auto pos = static_cast<std::size_t>(afe_it - afe_.begin());
          afe_.erase(afe_it);
          if (pos < bookmark) --bookmark;
          afe_it = afe_.end();
        }
        if (afe_it == afe_.end()) {
          open_.erase(open_.begin() + static_cast<std::ptrdiff_t>(idx));
          continue;
        }
        NodeId repl = create_element(token_for(n), Namespace::kHtml);
        *afe_it = repl;
        open_[idx] = repl;
        if (last == furthest) {
          bookmark = static_cast<std::size_t>(afe_it - afe_.begin()) + 1;
        }
        doc_.append_child(repl, last);
        last = repl;
      }
      Place place = appropriate_place(common);
      doc_.insert_before(place.parent, last, place.before);

      NodeId fresh = create_element(token_for(fe), Namespace::kHtml);
      std::vector<NodeId> moved = node(furthest).children;
      for (NodeId c : moved) doc_.append_child(fresh, c);
      doc_.append_child(furthest, fresh);

      auto fe_pos = static_cast<std::size_t>(
          std::find(afe_.begin(), afe_.end(), fe) - afe_.begin());
      afe_.erase(afe_.begin() + static_cast<std::ptrdiff_t>(fe_pos));
      if (fe_pos < bookmark) --bookmark;
      afe_.insert(afe_.begin() + static_cast<std::ptrdiff_t>(bookmark), fresh);

      open_.erase(std::find(open_.begin(), open_.end(), fe));
      auto fb_it = std::find(open_.begin(), open_.end(), furthest);
      open_.insert(fb_it + 1, fresh);
    }
    return true;
  }

  // ---- insertion mode reset -----------------------------------------------

  void reset_insertion_mode() {
    for (int i = static_cast<int>(open_.size()) - 1; i >= 0; --i) {
      NodeId n = open_[i];
      bool last = i == 0;
      const Node& e = node(n);
      if (e.ns != Namespace::kHtml) {
        if (last) {
          mode_ = Mode::kInBody;
          return;
        }
        continue;
      }
      const std::string& name = e.name;
      if (name == "select") {
        if (!last) {
          for (int j = i - 1; j > 0; --j) {
            if (is_html(open_[j], "template")) break;
            if (is_html(open_[j], "table")) {
              mode_ = Mode::kInSelectInTable;
              return;
            }
          }
        }
        mode_ = Mode::kInSelect;
        return;
      }
      if ((name == "td" || name == "th") && !last) {
        mode_ = Mode::kInCell;
        return;
      }
      if (name == "tr") {
        mode_ = Mode::kInRow;
        return;
      }
      if (one_of(name, {"tbody", "thead", "tfoot"})) {
        mode_ = Mode::kInTableBody;
        return;
      }
      if (name == "caption") {
        mode_ = Mode::kInCaption;
        return;
      }
      if (name == "colgroup") {
        mode_ = Mode::kInColumnGroup;
        return;
      }
      if (name == "table") {
        mode_ = Mode::kInTable;
        return;
      }
      if (name == "template") {
        mode_ = template_modes_.empty() ? Mode::kInBody : template_modes_.back();
        return;
      }
      if (name == "head" && !last) {
        mode_ = Mode::kInHead;
        return;
      }
      if (name == "body") {
        mode_ = Mode::kInBody;
        return;
      }
      if (name == "frameset") {
        mode_ = Mode::kInFrameset;
        return;
      }
      if (name == "html") {
        mode_ = head_ == kNoNode ? Mode::kBeforeHead : Mode::kAfterHead;
        return;
      }
      if (last) {
        mode_ = Mode::kInBody;
        return;
      }
    }
    mode_ = Mode::kInBody;
  }

  // ---- dispatch -----------------------------------------------------------

  bool use_html_rules(const Token& t) const {
    if (open_.empty()) return true;
    NodeId acn = current();
    const Node& n = node(acn);
    if (n.ns == Namespace::kHtml) return true;
    if (t.type == Type::kEof) return true;
    if (is_mathml_text_integration_point(acn)) {
      if (t.type == Type::kStartTag && t.name != "mglyph" && t.name != "malignmark") {
        return true;
      }
      if (t.type == Type::kCharacter) return true;
    }
    if (n.ns == Namespace::kMathMl && n.name == "annotation-xml" &&
        t.type == Type::kStartTag && t.name == "svg") {
      return true;
    }
    if (is_html_integration_point(acn) &&
        (t.type == Type::kStartTag || t.type == Type::kCharacter)) {
      return true;
    }
    return false;
  }

  void dispatch(Token& t) {
    if (use_html_rules(t)) {
      process(t, mode_);
    } else {
      process_foreign(t);
    }
  }

  void process(Token& t, Mode mode) {
    switch (mode) {
      case Mode::kInitial: return initial(t);
      case Mode::kBeforeHtml: return before_html(t);
      case Mode::kBeforeHead: return before_head(t);
      case Mode::kInHead: return in_head(t);
      case Mode::kInHeadNoscript: return in_head_noscript(t);
      case Mode::kAfterHead: return after_head(t);
      case Mode::kInBody: return in_body(t);
      case Mode::kText: return text(t);
      case Mode::kInTable: return in_table(t);
      case Mode::kInTableText: return in_table_text(t);
      case Mode::kInCaption: return in_caption(t);
      case Mode::kInColumnGroup: return in_column_group(t);
      case Mode::kInTableBody: return in_table_body(t);
      case Mode::kInRow: return in_row(t);
      case Mode::kInCell: return in_cell(t);
      case Mode::kInSelect: return in_select(t);
      case Mode::kInSelectInTable: return in_select_in_table(t);
      case Mode::kInTemplate: return in_template(t);
      case Mode::kAfterBody: return after_body(t);
      case Mode::kInFrameset: return in_frameset(t);
      case Mode::kAfterFrameset: return after_frameset(t);
      case Mode::kAfterAfterBody: return after_after_body(t);
      case Mode::kAfterAfterFrameset: return after_after_frameset(t);
    }
  }

  void reprocess(Token& t, Mode mode) {
    mode_ = mode;
    process(t, mode_);
  }

  // ---- insertion modes ----------------------------------------------------

  void initial(Token& t) {
    if (t.type == Type::kCharacter) {
      take_leading_whitespace(t.data);
      if (t.data.empty()) return;
    } else if (t.type == Type::kComment) {
      insert_comment(t, doc_.root());
      return;
    } else if (t.type == Type::kDoctype) {
      NodeId id = doc_.create(NodeKind::kDoctype, t.name);
      doc_.append_child(doc_.root(), id);
      quirks_ = doctype_is_quirky(t);
      mode_ = Mode::kBeforeHtml;
      return;
    }
    quirks_ = true;
    reprocess(t, Mode::kBeforeHtml);
  }

  void before_html(Token& t) {
    switch (t.type) {
      case Type::kDoctype:
        return;
      case Type::kComment:
        insert_comment(t, doc_.root());
        return;
      case Type::kCharacter:
        take_leading_whitespace(t.data);
        if (t.data.empty()) return;
        break;
      case Type::kStartTag:
        if (t.name == "html") {
          NodeId id = create_element(t, Namespace::kHtml);
          doc_.append_child(doc_.root(), id);
          open_.push_back(id);
          mode_ = Mode::kBeforeHead;
          return;
        }
        break;
      case Type::kEndTag:
        if (!one_of(t.name, {"head", "body", "html", "br"})) return;
        break;
      case Type::kEof:
        break;
    }
    Token html;
    html.type = Type::kStartTag;
    html.name = "html";
    NodeId id = create_element(html, Namespace::kHtml);
    doc_.append_child(doc_.root(), id);
    open_.push_back(id);
    reprocess(t, Mode::kBeforeHead);
  }

  void before_head(Token& t) {
    switch (t.type) {
      case Type::kCharacter:
        take_leading_whitespace(t.data);
        if (t.data.empty()) return;
        break;
      case Type::kComment:
        insert_comment(t);
        return;
      case Type::kDoctype:
        return;
      case Type::kStartTag:
        if (t.name == "html") return in_body(t);
        if (t.name == "head") {
          head_ = insert_element(t);
          mode_ = Mode::kInHead;
          return;
        }
        break;
      case Type::kEndTag:
        if (!one_of(t.name, {"head", "body", "html", "br"})) return;
        break;
      case Type::kEof:
        break;
    }
    head_ = insert_element_named("head");
    reprocess(t, Mode::kInHead);
  }

  void in_head(Token& t) {
    switch (t.type) {
      case Type::kCharacter: {
        insert_characters(take_leading_whitespace(t.data));
        if (t.data.empty()) return;
        break;
      }
      case Type::kComment:
        insert_comment(t);
        return;
      case Type::kDoctype:
        return;
      case Type::kStartTag:
        if (t.name == "html") return in_body(t);
        if (one_of(t.name, {"base", "basefont", "bgsound", "link", "meta"})) {
          insert_void(t);
          return;
        }
        if (t.name == "title") return parse_generic_text(t, Tokenizer::State::kRcdata);
        if ((t.name == "noscript" && options_.scripting) || t.name == "noframes" ||
            t.name == "style") {
          return parse_generic_text(t, Tokenizer::State::kRawtext);
        }
        if (t.name == "noscript") {
          insert_element(t);
          mode_ = Mode::kInHeadNoscript;
          return;
        }
        if (t.name == "script") return parse_generic_text(t, Tokenizer::State::kScriptData);
        if (t.name == "template") {
          insert_element(t);
          afe_.push_back(kMarker);
          frameset_ok_ = false;
          mode_ = Mode::kInTemplate;
          template_modes_.push_back(Mode::kInTemplate);
          return;
        }
        if (t.name == "head") return;
        break;
      case Type::kEndTag:
        if (t.name == "head") {
          open_.pop_back();
          mode_ = Mode::kAfterHead;
          return;
        }
        if (t.name == "template") {
          if (!template_on_stack()) return;
          generate_all_implied_end_tags();
          pop_until("template");
          clear_formatting_to_marker();
          if (!template_modes_.empty()) template_modes_.pop_back();
          reset_insertion_mode();
          return;
        }
        if (!one_of(t.name, {"body", "html", "br"})) return;
        break;
      case Type::kEof:
        break;
    }
    open_.pop_back();
    reprocess(t, Mode::kAfterHead);
  }

  void in_head_noscript(Token& t) {
    switch (t.type) {
      case Type::kDoctype:
        return;
      case Type::kStartTag:
        if (t.name == "html") return in_body(t);
        if (one_of(t.name, {"basefont", "bgsound", "link", "meta", "noframes", "style"})) {
          return in_head(t);
        }
        if (t.name == "head" || t.name == "noscript") return;
        break;
      case Type::kEndTag:
        if (t.name == "noscript") {
          open_.pop_back();
          mode_ = Mode::kInHead;
          return;
        }
        if (t.name != "br") return;
        break;
      case Type::kCharacter: {
        std::string ws = take_leading_whitespace(t.data);
        insert_characters(ws);
        if (t.data.empty()) return;
        break;
      }
      case Type::kComment:
        return in_head(t);
      case Type::kEof:
        break;
    }
    open_.pop_back();
    reprocess(t, Mode::kInHead);
  }

  void after_head(Token& t) {
    switch (t.type) {
      case Type::kCharacter:
        insert_characters(take_leading_whitespace(t.data));
        if (t.data.empty()) return;
        break;
      case Type::kComment:
        insert_comment(t);
        return;
      case Type::kDoctype:
        return;
      case Type::kStartTag:
        if (t.name == "html") return in_body(t);
        if (t.name == "body") {
          insert_element(t);
          frameset_ok_ = false;
          mode_ = Mode::kInBody;
          return;
        }
        if (t.name == "frameset") {
          insert_element(t);
          mode_ = Mode::kInFrameset;
          return;
        }
        if (one_of(t.name, {"base", "basefont", "bgsound", "link", "meta", "noframes",
                            "script", "style", "template", "title"})) {
          open_.push_back(head_);
          NodeId head = head_;
          in_head(t);
          auto it = std::find(open_.begin(), open_.end(), head);
          if (it != open_.end()) open_.erase(it);
          return;
        }
        if (t.name == "head") return;
        break;
      case Type::kEndTag:
        if (t.name == "template") return in_head(t);
        if (!one_of(t.name, {"body", "html", "br"})) return;
        break;
      case Type::kEof:
        break;
    }
    insert_element_named("body");
    reprocess(t, Mode::kInBody);
  }

  void in_body(Token& t) {
    switch (t.type) {
      case Type::kCharacter: {
        remove_nulls(t.data);
        if (t.data.empty()) return;
        reconstruct_formatting();
        insert_characters(t.data);
        if (!all_whitespace(t.data)) frameset_ok_ = false;
        return;
      }
      case Type::kComment:
        insert_comment(t);
        return;
      case Type::kDoctype:
        return;
      case Type::kEof:
        if (!template_modes_.empty()) return in_template(t);
        return;
      case Type::kStartTag:
        return in_body_start(t);
      case Type::kEndTag:
        return in_body_end(t);
    }
  }

  void in_body_start(Token& t) {
    const std::string& name = t.name;
    if (name == "html") return;
    if (one_of(name, {"base", "basefont", "bgsound", "link", "meta", "noframes", "script",
                      "style", "template", "title"})) {
      return in_head(t);
    }
    if (name == "body") {
      if (open_.size() < 2 || !is_html(open_[1], "body") || template_on_stack()) return;
      frameset_ok_ = false;
      return;
    }
    if (name == "frameset") {
      if (open_.size() < 2 || !is_html(open_[1], "body") || !frameset_ok_) return;
      doc_.detach(open_[1]);
      open_.resize(1);
      insert_element(t);
      mode_ = Mode::kInFrameset;
      return;
    }
    if (one_of(name, {"address", "article", "aside", "blockquote", "center", "details",
                      "dialog", "dir", "div", "dl", "fieldset", "figcaption", "figure",
                      "footer", "header", "hgroup", "main", "menu", "nav", "ol", "p",
                      "search", "section", "summary", "ul"})) {
      close_p_if_in_button_scope();
      insert_element(t);
      return;
    }
    if (one_of(name, {"h1", "h2", "h3", "h4", "h5", "h6"})) {
      close_p_if_in_button_scope();
      if (is_html_in(current(), {"h1", "h2", "h3", "h4", "h5", "h6"})) open_.pop_back();
      insert_element(t);
      return;
    }
    if (name == "pre" || name == "listing") {
      close_p_if_in_button_scope();
      insert_element(t);
      skip_newline_ = true;
      frameset_ok_ = false;
      return;
    }
    if (name == "form") {
      bool has_template = template_on_stack();
      if (form_ != kNoNode && !has_template) return;
      close_p_if_in_button_scope();
      NodeId id = insert_element(t);
      if (!has_template) form_ = id;
      return;
    }
    if (name == "li" || name == "dd" || name == "dt") {
      frameset_ok_ = false;
      for (int i = static_cast<int>(open_.size()) - 1; i >= 0; --i) {
        NodeId n = open_[i];
        bool match = name == "li" ? is_html(n, "li") : is_html_in(n, {"dd", "dt"});
        if (match) {
          std::string target = node(n).name;
          generate_implied_end_tags(target);
          pop_until(target);
          break;
        }
        if (is_special(n) && !is_html_in(n, {"address", "div", "p"})) break;
      }
      close_p_if_in_button_scope();
      insert_element(t);
      return;
    }
    if (name == "plaintext") {
      close_p_if_in_button_scope();
      insert_element(t);
      tokenizer_.set_state(Tokenizer::State::kPlaintext);
      return;
    }
    if (name == "button") {
      if (in_scope("button")) {
        generate_implied_end_tags();
        pop_until("button");
      }
      reconstruct_formatting();
      insert_element(t);
      frameset_ok_ = false;
      return;
    }
    if (name == "a") {
      for (int i = static_cast<int>(afe_.size()) - 1; i >= 0; --i) {
        if (afe_[i] == kMarker) break;
        if (is_html(afe_[i], "a")) {
          NodeId a = afe_[i];
          adoption_agency("a");
          auto ai = std::find(afe_.begin(), afe_.end(), a);
          if (ai != afe_.end()) afe_.erase(ai);
          auto si = std::find(open_.begin(), open_.end(), a);
          if (si != open_.end()) open_.erase(si);
          break;
        }
      }
      reconstruct_formatting();
      push_formatting(insert_element(t));
      return;
    }
    if (one_of(name, {"b", "big", "code", "em", "font", "i", "s", "small", "strike",
                      "strong", "tt", "u"})) {
      reconstruct_formatting();
      push_formatting(insert_element(t));
      return;
    }
    if (name == "nobr") {
      reconstruct_formatting();
      if (in_scope("nobr")) {
        adoption_agency("nobr");
        reconstruct_formatting();
      }
      push_formatting(insert_element(t));
      return;
    }
    if (one_of(name, {"applet", "marquee", "object"})) {
      reconstruct_formatting();
      insert_element(t);
      afe_.push_back(kMarker);
      frameset_ok_ = false;
      return;
    }
    if (name == "table") {
      if (!quirks_) close_p_if_in_button_scope();
      insert_element(t);
      frameset_ok_ = false;
      mode_ = Mode::kInTable;
      return;
    }
    if (one_of(name, {"area", "br", "embed", "img", "keygen", "wbr"})) {
      reconstruct_formatting();
      insert_void(t);
      frameset_ok_ = false;
      return;
    }
    if (name == "input") {
      reconstruct_formatting();
      insert_void(t);
      const std::string* type = t.attribute("type");
      if (!type || to_ascii_lower(*type) != "hidden") frameset_ok_ = false;
      return;
    }
    if (one_of(name, {"param", "source", "track"})) {
      insert_void(t);
      return;
    }
    if (name == "hr") {
      close_p_if_in_button_scope();
      insert_void(t);
      frameset_ok_ = false;
      return;
    }
    if (name == "image") {
      t.name = "img";
      return in_body_start(t);
    }
    if (name == "textarea") {
      insert_element(t);
      skip_newline_ = true;
      tokenizer_.set_state(Tokenizer::State::kRcdata);
      original_mode_ = mode_;
      frameset_ok_ = false;
      mode_ = Mode::kText;
      return;
    }
    if (name == "xmp") {
      close_p_if_in_button_scope();
      reconstruct_formatting();
      frameset_ok_ = false;
      return parse_generic_text(t, Tokenizer::State::kRawtext);
    }
    if (name == "iframe") {
      frameset_ok_ = false;
      return parse_generic_text(t, Tokenizer::State::kRawtext);
    }
    if (name == "noembed" || (name == "noscript" && options_.scripting)) {
      return parse_generic_text(t, Tokenizer::State::kRawtext);
    }
    if (name == "select") {
      reconstruct_formatting();
      insert_element(t);
      frameset_ok_ = false;
      if (one_of_mode(mode_, {Mode::kInTable, Mode::kInCaption, Mode::kInTableBody,
                              Mode::kInRow, Mode::kInCell})) {
        mode_ = Mode::kInSelectInTable;
      } else {
        mode_ = Mode::kInSelect;
      }
      return;
    }
    if (name == "optgroup" || name == "option") {
      if (is_html(current(), "option")) open_.pop_back();
      reconstruct_formatting();
      insert_element(t);
      return;
    }
    if (name == "rb" || name == "rtc") {
      if (in_scope("ruby")) generate_implied_end_tags();
      insert_element(t);
      return;
    }
    if (name == "rp" || name == "rt") {
      if (in_scope("ruby")) generate_implied_end_tags("rtc");
      insert_element(t);
      return;
    }
    if (name == "math" || name == "svg") {
      reconstruct_formatting();
      insert_element(t, name == "math" ? Namespace::kMathMl : Namespace::kSvg);
      if (t.self_closing) open_.pop_back();
      return;
    }
    if (one_of(name, {"caption", "col", "colgroup", "frame", "head", "tbody", "td",
                      "tfoot", "th", "thead", "tr"})) {
      return;
    }
    reconstruct_formatting();
    insert_element(t);
  }

  static bool one_of_mode(Mode m, std::initializer_list<Mode> modes) {
    return std::find(modes.begin(), modes.end(), m) != modes.end();
  }

  void in_body_end(Token& t) {
    const std::string& name = t.name;
    if (name == "template") return in_head(t);
    if (name == "body") {
      if (!in_scope("body")) return;
      mode_ = Mode::kAfterBody;
      return;
    }
    if (name == "html") {
      if (!in_scope("body")) return;
      return reprocess(t, Mode::kAfterBody);
    }
    if (one_of(name, {"address", "article", "aside", "blockquote", "button", "center",
                      "details", "dialog", "dir", "div", "dl", "fieldset", "figcaption",
                      "figure", "footer", "header", "hgroup", "listing", "main", "menu",
                      "nav", "ol", "pre", "search", "section", "summary", "ul"})) {
      if (!in_scope(name)) return;
      generate_implied_end_tags();
      pop_until(name);
      return;
    }
    if (name == "form") {
      if (!template_on_stack()) {
        NodeId form = form_;
        form_ = kNoNode;
        if (form == kNoNode || !node_in_scope(form)) return;
        generate_implied_end_tags();
        open_.erase(std::find(open_.begin(), open_.end(), form));
      } else {
        if (!in_scope("form")) return;
        generate_implied_end_tags();
        pop_until("form");
      }
      return;
    }
    if (name == "p") {
      if (!in_scope("p", Scope::kButton)) insert_element_named("p");
      close_p();
      return;
    }
    if (name == "li") {
      if (!in_scope("li", Scope::kListItem)) return;
      generate_implied_end_tags("li");
      pop_until("li");
      return;
    }
    if (name == "dd" || name == "dt") {
      if (!in_scope(name)) return;
      generate_implied_end_tags(name);
      pop_until(name);
      return;
    }
    if (one_of(name, {"h1", "h2", "h3", "h4", "h5", "h6"})) {
      if (!in_scope_any({"h1", "h2", "h3", "h4", "h5", "h6"})) return;
      generate_implied_end_tags();
      pop_until_any({"h1", "h2", "h3", "h4", "h5", "h6"});
      return;
    }
    if (one_of(name, {"a", "b", "big", "code", "em", "font", "i", "nobr", "s", "small",
                      "strike", "strong", "tt", "u"})) {
      if (adoption_agency(name)) return;
      return any_other_end_tag(name);
    }
    if (one_of(name, {"applet", "marquee", "object"})) {
      if (!in_scope(name)) return;
      generate_implied_end_tags();
      pop_until(name);
      clear_formatting_to_marker();
      return;
    }
    if (name == "br") {
      Token br;
      br.type = Type::kStartTag;
      br.name = "br";
      return in_body_start(br);
    }
    any_other_end_tag(name);
  }

  void any_other_end_tag(const std::string& name) {
    for (int i = static_cast<int>(open_.size()) - 1; i >= 0; --i) {
      NodeId n = open_[i];
      if (is_html(n, name)) {
        generate_implied_end_tags(name);
        open_.resize(static_cast<std::size_t>(i));
        return;
      }
      if (is_special(n)) return;
    }
  }

  void text(Token& t) {
    if (t.type == Type::kCharacter) {
      insert_characters(t.data);
      return;
    }
    if (t.type == Type::kEof) {
      open_.pop_back();
      return reprocess(t, original_mode_);
    }
    if (t.type == Type::kEndTag) {
      open_.pop_back();
      mode_ = original_mode_;
    }
  }

  void in_table(Token& t) {
    switch (t.type) {
      case Type::kCharacter:
        if (is_html_in(current(), {"table", "tbody", "template", "tfoot", "thead", "tr"})) {
          pending_table_text_.clear();
          original_mode_ = mode_;
          return reprocess(t, Mode::kInTableText);
        }
        break;
      case Type::kComment:
        insert_comment(t);
        return;
      case Type::kDoctype:
        return;
      case Type::kStartTag: {
        const std::string& name = t.name;
        if (name == "caption") {
          clear_to_table_context();
          afe_.push_back(kMarker);
          insert_element(t);
          mode_ = Mode::kInCaption;
          return;
        }
        if (name == "colgroup") {
          clear_to_table_context();
          insert_element(t);
          mode_ = Mode::kInColumnGroup;
          return;
        }
        if (name == "col") {
          clear_to_table_context();
          insert_element_named("colgroup");
          return reprocess(t, Mode::kInColumnGroup);
        }
        if (one_of(name, {"tbody", "tfoot", "thead"})) {
          clear_to_table_context();
          insert_element(t);
          mode_ = Mode::kInTableBody;
          return;
        }
        if (one_of(name, {"td", "th", "tr"})) {
          clear_to_table_context();
          insert_element_named("tbody");
          return reprocess(t, Mode::kInTableBody);
        }
        if (name == "table") {
          if (!in_scope("table", Scope::kTable)) return;
          pop_until("table");
          reset_insertion_mode();
          return process(t, mode_);
        }
        if (one_of(name, {"style", "script", "template"})) return in_head(t);
        if (name == "input") {
          const std::string* type = t.attribute("type");
          if (type && to_ascii_lower(*type) == "hidden") {
            insert_void(t);
            return;
          }
          break;
        }
        if (name == "form") {
          if (template_on_stack() || form_ != kNoNode) return;
          form_ = insert_element(t);
          open_.pop_back();
          return;
        }
        break;
      }
      case Type::kEndTag: {
        const std::string& name = t.name;
        if (name == "table") {
          if (!in_scope("table", Scope::kTable)) return;
          pop_until("table");
          reset_insertion_mode();
          return;
        }
        if (one_of(name, {"body", "caption", "col", "colgroup", "html", "tbody", "td",
                          "tfoot", "th", "thead", "tr"})) {
          return;
        }
        if (name == "template") return in_head(t);
        break;
      }
      case Type::kEof:
        return in_body(t);
    }
    foster_parenting_ = true;
    in_body(t);
    foster_parenting_ = false;
  }

  void in_table_text(Token& t) {
    if (t.type == Type::kCharacter) {
      remove_nulls(t.data);
      pending_table_text_ += t.data;
      return;
    }
    if (!all_whitespace(pending_table_text_)) {
      Token chars;
      chars.type = Type::kCharacter;
      chars.data = std::move(pending_table_text_);
      foster_parenting_ = true;
      in_body(chars);
      foster_parenting_ = false;
    } else {
      insert_characters(pending_table_text_);
    }
    pending_table_text_.clear();
    reprocess(t, original_mode_);
  }

  void close_caption() {
    generate_implied_end_tags();
    pop_until("caption");
    clear_formatting_to_marker();
    mode_ = Mode::kInTable;
  }

  void in_caption(Token& t) {
    if (t.type == Type::kEndTag && t.name == "caption") {
      if (!in_scope("caption", Scope::kTable)) return;
      close_caption();
      return;
    }
    if ((t.type == Type::kStartTag &&
         one_of(t.name, {"caption", "col", "colgroup", "tbody", "td", "tfoot", "th",
                         "thead", "tr"})) ||
        (t.type == Type::kEndTag && t.name == "table")) {
      if (!in_scope("caption", Scope::kTable)) return;
      close_caption();
      return process(t, mode_);
    }
    if (t.type == Type::kEndTag &&
        one_of(t.name, {"body", "col", "colgroup", "html", "tbody", "td", "tfoot", "th",
                        "thead", "tr"})) {
      return;
    }
    in_body(t);
  }

  void in_column_group(Token& t) {
    switch (t.type) {
      case Type::kCharacter:
        insert_characters(take_leading_whitespace(t.data));
        if (t.data.empty()) return;
        break;
      case Type::kComment:
        insert_comment(t);
        return;
      case Type::kDoctype:
        return;
      case Type::kStartTag:
        if (t.name == "html") return in_body(t);
        if (t.name == "col") {
          insert_void(t);
          return;
        }
        if (t.name == "template") return in_head(t);
        break;
      case Type::kEndTag:
        if (t.name == "colgroup") {
          if (!is_html(current(), "colgroup")) return;
          open_.pop_back();
          mode_ = Mode::kInTable;
          return;
        }
        if (t.name == "col") return;
        if (t.name == "template") return in_head(t);
        break;
      case Type::kEof:
        return in_body(t);
    }
    if (!is_html(current(), "colgroup")) return;
    open_.pop_back();
    reprocess(t, Mode::kInTable);
  }

  void in_table_body(Token& t) {
    if (t.type == Type::kStartTag) {
      if (t.name == "tr") {
        clear_to_table_body_context();
        insert_element(t);
        mode_ = Mode::kInRow;
        return;
      }
      if (t.name == "th" || t.name == "td") {
        clear_to_table_body_context();
        insert_element_named("tr");
        return reprocess(t, Mode::kInRow);
      }
      if (one_of(t.name, {"caption", "col", "colgroup", "tbody", "tfoot", "thead"})) {
        if (!in_scope_any({"tbody", "thead", "tfoot"}, Scope::kTable)) return;
        clear_to_table_body_context();
        open_.pop_back();
        return reprocess(t, Mode::kInTable);
      }
    } else if (t.type == Type::kEndTag) {
      if (one_of(t.name, {"tbody", "tfoot", "thead"})) {
        if (!in_scope(t.name, Scope::kTable)) return;
        clear_to_table_body_context();
        open_.pop_back();
        mode_ = Mode::kInTable;
        return;
      }
      if (t.name == "table") {
        if (!in_scope_any({"tbody", "thead", "tfoot"}, Scope::kTable)) return;
        clear_to_table_body_context();
        open_.pop_back();
        return reprocess(t, Mode::kInTable);
      }
      if (one_of(t.name, {"body", "caption", "col", "colgroup", "html", "td", "th", "tr"})) {
        return;
      }
    }
    in_table(t);
  }

  void in_row(Token& t) {
    if (t.type == Type::kStartTag) {
      if (t.name == "th" || t.name == "td") {
        clear_to_row_context();
        insert_element(t);
        mode_ = Mode::kInCell;
        afe_.push_back(kMarker);
        return;
      }
      if (one_of(t.name, {"caption", "col", "colgroup", "tbody", "tfoot", "thead", "tr"})) {
        if (!in_scope("tr", Scope::kTable)) return;
        clear_to_row_context();
        open_.pop_back();
        return reprocess(t, Mode::kInTableBody);
      }
    } else if (t.type == Type::kEndTag) {
      if (t.name == "tr") {
        if (!in_scope("tr", Scope::kTable)) return;
        clear_to_row_context();
        open_.pop_back();
        mode_ = Mode::kInTableBody;
        return;
      }
      if (t.name == "table") {
        if (!in_scope("tr", Scope::kTable)) return;
        clear_to_row_context();
        open_.pop_back();
        return reprocess(t, Mode::kInTableBody);
      }
      if (one_of(t.name, {"tbody", "tfoot", "thead"})) {
        if (!in_scope(t.name, Scope::kTable)) return;
        if (!in_scope("tr", Scope::kTable)) return;
        clear_to_row_context();
        open_.pop_back();
        return reprocess(t, Mode::kInTableBody);
      }
      if (one_of(t.name, {"body", "caption", "col", "colgroup", "html", "td", "th"})) {
        return;
      }
    }
    in_table(t);
  }

  void close_cell() {
    generate_implied_end_tags();
    pop_until_any({"td", "th"});
    clear_formatting_to_marker();
    mode_ = Mode::kInRow;
  }

  void in_cell(Token& t) {
    if (t.type == Type::kEndTag) {
      if (t.name == "td" || t.name == "th") {
        if (!in_scope(t.name, Scope::kTable)) return;
        generate_implied_end_tags();
        pop_until(t.name);
        clear_formatting_to_marker();
        mode_ = Mode::kInRow;
        return;
      }
      if (one_of(t.name, {"body", "caption", "col", "colgroup", "html"})) return;
      if (one_of(t.name, {"table", "tbody", "tfoot", "thead", "tr"})) {
        if (!in_scope(t.name, Scope::kTable)) return;
        close_cell();
        return process(t, mode_);
      }
    } else if (t.type == Type::kStartTag &&
               one_of(t.name, {"caption", "col", "colgroup", "tbody", "td", "tfoot", "th",
                               "thead", "tr"})) {
      if (!in_scope_any({"td", "th"}, Scope::kTable)) return;
      close_cell();
      return process(t, mode_);
    }
    in_body(t);
  }

  void in_select(Token& t) {
    switch (t.type) {
      case Type::kCharacter:
        remove_nulls(t.data);
        insert_characters(t.data);
        return;
      case Type::kComment:
        insert_comment(t);
        return;
      case Type::kDoctype:
        return;
      case Type::kStartTag:
        if (t.name == "html") return in_body(t);
        if (t.name == "option") {
          if (is_html(current(), "option")) open_.pop_back();
          insert_element(t);
          return;
        }
        if (t.name == "optgroup") {
          if (is_html(current(), "option")) open_.pop_back();
          if (is_html(current(), "optgroup")) open_.pop_back();
          insert_element(t);
          return;
        }
        if (t.name == "select") {
          if (!in_scope("select", Scope::kSelect)) return;
          pop_until("select");
          reset_insertion_mode();
          return;
        }
        if (one_of(t.name, {"input", "keygen", "textarea"})) {
          if (!in_scope("select", Scope::kSelect)) return;
          pop_until("select");
          reset_insertion_mode();
          return process(t, mode_);
        }
        if (t.name == "script" || t.name == "template") return in_head(t);
        return;
      case Type::kEndTag:
        if (t.name == "optgroup") {
          if (is_html(current(), "option") && open_.size() >= 2 &&
              is_html(open_[open_.size() - 2], "optgroup")) {
            open_.pop_back();
          }
          if (is_html(current(), "optgroup")) open_.pop_back();
          return;
        }
        if (t.name == "option") {
          if (is_html(current(), "option")) open_.pop_back();
          return;
        }
        if (t.name == "select") {
          if (!in_scope("select", Scope::kSelect)) return;
          pop_until("select");
          reset_insertion_mode();
          return;
        }
        if (t.name == "template") return in_head(t);
        return;
      case Type::kEof:
        return in_body(t);
    }
  }

  void in_select_in_table(Token& t) {
    auto tableish = [](std::string_view n) {
      return one_of(n, {"caption", "table", "tbody", "tfoot", "thead", "tr", "td", "th"});
    };
    if (t.type == Type::kStartTag && tableish(t.name)) {
      pop_until("select");
      reset_insertion_mode();
      return process(t, mode_);
    }
    if (t.type == Type::kEndTag && tableish(t.name)) {
      if (!in_scope(t.name, Scope::kTable)) return;
      pop_until("select");
      reset_insertion_mode();
      return process(t, mode_);
    }
    in_select(t);
  }

  void switch_template_mode(Token& t, Mode mode) {
    if (!template_modes_.empty()) template_modes_.pop_back();
    template_modes_.push_back(mode);
    reprocess(t, mode);
  }

  void in_template(Token& t) {
    switch (t.type) {
      case Type::kCharacter:
      case Type::kComment:
      case Type::kDoctype:
        return in_body(t);
      case Type::kStartTag:
        if (one_of(t.name, {"base", "basefont", "bgsound", "link", "meta", "noframes",
                            "script", "style", "template", "title"})) {
          return in_head(t);
        }
        if (one_of(t.name, {"caption", "colgroup", "tbody", "tfoot", "thead"})) {
          return switch_template_mode(t, Mode::kInTable);
        }
        if (t.name == "col") return switch_template_mode(t, Mode::kInColumnGroup);
        if (t.name == "tr") return switch_template_mode(t, Mode::kInTableBody);
        if (t.name == "td" || t.name == "th") return switch_template_mode(t, Mode::kInRow);
        return switch_template_mode(t, Mode::kInBody);
      case Type::kEndTag:
        if (t.name == "template") return in_head(t);
        return;
      case Type::kEof:
        if (!template_on_stack()) return;
        pop_until("template");
        clear_formatting_to_marker();
        if (!template_modes_.empty()) template_modes_.pop_back();
        reset_insertion_mode();
        return process(t, mode_);
    }
  }

  void after_body(Token& t) {
    switch (t.type) {
      case Type::kCharacter: {
        std::string ws = take_leading_whitespace(t.data);
        if (!ws.empty()) {
          Token wt;
          wt.type = Type::kCharacter;
          wt.data = std::move(ws);
          in_body(wt);
        }
        if (t.data.empty()) return;
        break;
      }
      case Type::kComment:
        insert_comment(t, open_.front());
        return;
      case Type::kDoctype:
        return;
      case Type::kStartTag:
        if (t.name == "html") return in_body(t);
        break;
      case Type::kEndTag:
        if (t.name == "html") {
          mode_ = Mode::kAfterAfterBody;
          return;
        }
        break;
      case Type::kEof:
        return;
    }
    reprocess(t, Mode::kInBody);
  }

  void in_frameset(Token& t) {
    switch (t.type) {
      case Type::kCharacter:
        insert_characters(only_whitespace(t.data));
        return;
      case Type::kComment:
        insert_comment(t);
        return;
      case Type::kDoctype:
        return;
      case Type::kStartTag:
        if (t.name == "html") return in_body(t);
        if (t.name == "frameset") {
          insert_element(t);
          return;
        }
        if (t.name == "frame") {
          insert_void(t);
          return;
        }
        if (t.name == "noframes") return in_head(t);
        return;
      case Type::kEndTag:
        if (t.name == "frameset") {
          if (open_.size() == 1) return;
          open_.pop_back();
          if (!is_html(current(), "frameset")) mode_ = Mode::kAfterFrameset;
        }
        return;
      case Type::kEof:
        return;
    }
  }

  void after_frameset(Token& t) {
    switch (t.type) {
      case Type::kCharacter:
        insert_characters(only_whitespace(t.data));
        return;
      case Type::kComment:
        insert_comment(t);
        return;
      case Type::kStartTag:
        if (t.name == "html") return in_body(t);
        if (t.name == "noframes") return in_head(t);
        return;
      case Type::kEndTag:
        if (t.name == "html") mode_ = Mode::kAfterAfterFrameset;
        return;
      default:
        return;
    }
  }

  void after_after_body(Token& t) {
    switch (t.type) {
      case Type::kComment:
        insert_comment(t, doc_.root());
        return;
      case Type::kDoctype:
        return in_body(t);
      case Type::kCharacter: {
        std::string ws = take_leading_whitespace(t.data);
        if (!ws.empty()) {
          Token wt;
          wt.type = Type::kCharacter;
          wt.data = std::move(ws);
          in_body(wt);
        }
        if (t.data.empty()) return;
        break;
      }
      case Type::kStartTag:
        if (t.name == "html") return in_body(t);
        break;
      case Type::kEof:
        return;
      default:
        break;
    }
    reprocess(t, Mode::kInBody);
  }

  void after_after_frameset(Token& t) {
    switch (t.type) {
      case Type::kComment:
        insert_comment(t, doc_.root());
        return;
      case Type::kDoctype:
        return in_body(t);
      case Type::kCharacter: {
        std::string ws = only_whitespace(t.data);
        if (!ws.empty()) {
          Token wt;
          wt.type = Type::kCharacter;
          wt.data = std::move(ws);
          in_body(wt);
        }
        return;
      }
      case Type::kStartTag:
        if (t.name == "html") return in_body(t);
        if (t.name == "noframes") return in_head(t);
        return;
      default:
        return;
    }
  }

  // ---- foreign content ----------------------------------------------------

  void process_foreign(Token& t) {
    switch (t.type) {
      case Type::kCharacter: {
        std::string data;
        data.reserve(t.data.size());
        for (char c : t.data) {
          if (c == '\0') {
            data.append("\xEF\xBF\xBD");
          } else {
            data.push_back(c);
          }
        }
        insert_characters(data);
        if (!all_whitespace(data)) frameset_ok_ = false;
        return;
      }
      case Type::kComment:
        insert_comment(t);
        return;
      case Type::kDoctype:
      case Type::kEof:
        return;
      case Type::kStartTag: {
        bool breakout = breaks_out_of_foreign_content(t.name) ||
                        (t.name == "font" && (t.attribute("color") || t.attribute("face") ||
                                              t.attribute("size")));
        if (breakout) return break_out_of_foreign(t);
        Namespace ns = node(current()).ns;
        insert_element(t, ns);
        if (t.self_closing) open_.pop_back();
        return;
      }
      case Type::kEndTag: {
        if (t.name == "br" || t.name == "p") return break_out_of_foreign(t);
        for (int i = static_cast<int>(open_.size()) - 1; i > 0; --i) {
          NodeId n = open_[i];
          if (to_ascii_lower(node(n).name) == t.name) {
            open_.resize(static_cast<std::size_t>(i));
            return;
          }
          if (node(open_[i - 1]).ns == Namespace::kHtml) {
            return process(t, mode_);
          }
        }
        return;
      }
    }
  }

  void break_out_of_foreign(Token& t) {
    while (!open_.empty() && !is_mathml_text_integration_point(current()) &&
           !is_html_integration_point(current()) &&
           node(current()).ns != Namespace::kHtml) {
      open_.pop_back();
    }
    process(t, mode_);
  }

  Document doc_;
  Tokenizer tokenizer_;
  ParseOptions options_;
  Mode mode_ = Mode::kInitial;
  Mode original_mode_ = Mode::kInitial;
  std::vector<Mode> template_modes_;
  std::vector<NodeId> open_;
  std::vector<NodeId> afe_;
  NodeId head_ = kNoNode;
  NodeId form_ = kNoNode;
  bool frameset_ok_ = true;
  bool foster_parenting_ = false;
  bool quirks_ = false;
  bool skip_newline_ = false;
  std::string pending_table_text_;
};

}  // namespace

bool breaks_out_of_foreign_content(std::string_view start_tag_name) {
  return one_of(start_tag_name,
                {"b",  "big", "blockquote", "body", "br",      "center", "code",
                 "dd", "div", "dl",         "dt",   "em",      "embed",  "h1",
                 "h2", "h3",  "h4",         "h5",   "h6",      "head",   "hr",
                 "i",  "img", "li",         "listing", "menu", "meta",   "nobr",
                 "ol", "p",   "pre",        "ruby", "s",       "small",  "span",
                 "strong", "strike", "sub", "sup",  "table",   "tt",     "u",
                 "ul", "var"});
}

Document parse_document(std::string_view utf8, const ParseOptions& options) {
  return TreeBuilder(utf8, options).run();
}

}  // namespace hdna::html
