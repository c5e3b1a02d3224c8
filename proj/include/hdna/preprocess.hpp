#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hdna/html/charset.hpp"
#include "hdna/html/dom.hpp"

namespace hdna {

// Bumped whenever a change here could alter fingerprints of stored pages.
inline constexpr std::string_view kPreprocessVersion = "hdna-pre1";

using RemovalSet = std::set<std::string, std::less<>>;

// script, meta, br, hr, link, input, style
const RemovalSet& default_removal_set();

// Element-only skeleton of a page. Node 0 is the synthetic document root
// (named "document"); every other node is an element with a lowercase name
// and no attributes.
class CleanDocument {
 public:
  struct Node {
    std::string name;
    std::optional<std::size_t> parent;
    std::vector<std::size_t> children;
  };

  CleanDocument();

  std::size_t root() const noexcept { return 0; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const Node& node(std::size_t id) const { return nodes_.at(id); }

  std::size_t add_child(std::size_t parent, std::string name);

 private:
  std::vector<Node> nodes_;
};

html::Document parse_html(const RawHtml& input);

html::Document remove_tags(const html::Document& tree,
                           const RemovalSet& removal = default_removal_set());
html::Document strip_attributes(const html::Document& tree);
CleanDocument strip_text(const html::Document& tree);

// strip_text(strip_attributes(remove_tags(parse_html(input))))
CleanDocument preprocess(const RawHtml& input);

// Serialises the skeleton back to markup (no text, no attributes).
std::string serialize(const CleanDocument& doc);

// Ordered-tree isomorphism with equal element names.
bool isomorphic(const CleanDocument& a, const CleanDocument& b);

}  // namespace hdna
