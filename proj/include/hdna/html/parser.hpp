#pragma once

#include <string_view>

#include "hdna/html/dom.hpp"

namespace hdna::html {

struct ParseOptions {
  // With scripting off, <noscript> content is parsed as markup rather than
  // raw text, which keeps the structure it wraps.
  bool scripting = false;
};

// Start tags (other than <font> with color/face/size) that end foreign content.
bool breaks_out_of_foreign_content(std::string_view start_tag_name);

// Error-tolerant HTML5 tree construction over UTF-8 text. Never throws on
// malformed markup; implied html/head/body elements are synthesised.
Document parse_document(std::string_view utf8, const ParseOptions& options = {});

}  // namespace hdna::html
