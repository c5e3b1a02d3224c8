#include "hdna/preprocess.hpp"

#include <algorithm>
#include <utility>

#include "hdna/html/parser.hpp"

namespace hdna {

using html::NodeId;
using html::NodeKind;

const RemovalSet& default_removal_set() {
  static const RemovalSet kSet{"script", "meta", "br", "hr", "link", "input", "style"};
  return kSet;
}

CleanDocument::CleanDocument() { nodes_.push_back(Node{"document", std::nullopt, {}}); }

std::size_t CleanDocument::add_child(std::size_t parent, std::string name) {
  std::size_t id = nodes_.size();
  nodes_.push_back(Node{std::move(name), parent, {}});
  nodes_.at(parent).children.push_back(id);
  return id;
}

html::Document parse_html(const RawHtml& input) {
  return html::parse_document(html::decode_to_utf8(input));
}

html::Document remove_tags(const html::Document& tree, const RemovalSet& removal) {
  html::Document out = tree.compact();
  std::vector<NodeId> victims;
  for (NodeId id : out.preorder()) {
    const auto& n = out.node(id);
    if (n.kind == NodeKind::kElement && removal.contains(n.name)) victims.push_back(id);
  }
  // Detaching an ancestor first leaves its removed descendants detached
  // from it, which is harmless: compact() only keeps what root reaches.
  for (NodeId id : victims) out.detach(id);
  return out.compact();
}

html::Document strip_attributes(const html::Document& tree) {
  html::Document out = tree.compact();
  for (NodeId id = 0; id < out.arena_size(); ++id) out.node(id).attributes.clear();
  return out;
}

CleanDocument strip_text(const html::Document& tree) {
  CleanDocument out;
  // (source node, parent in output)
  std::vector<std::pair<NodeId, std::size_t>> stack;
  const auto& root_kids = tree.node(tree.root()).children;
  for (auto it = root_kids.rbegin(); it != root_kids.rend(); ++it) {
    stack.emplace_back(*it, out.root());
  }
  while (!stack.empty()) {
    auto [id, parent] = stack.back();
    stack.pop_back();
    const auto& n = tree.node(id);
    if (n.kind != NodeKind::kElement) continue;
    std::size_t mine = out.add_child(parent, n.name);
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) {
      stack.emplace_back(*it, mine);
    }
  }
  return out;
}

CleanDocument preprocess(const RawHtml& input) {
  return strip_text(strip_attributes(remove_tags(parse_html(input))));
}

std::string serialize(const CleanDocument& doc) {
  std::string out;
  struct Step {
    std::size_t id;
    bool close;
  };
  std::vector<Step> stack;
  const auto& kids = doc.node(doc.root()).children;
  for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back({*it, false});
  while (!stack.empty()) {
    Step s = stack.back();
    stack.pop_back();
    const auto& n = doc.node(s.id);
    if (s.close) {
      out += "</" + n.name + ">";
      continue;
    }
    out += "<" + n.name;
    // An annotation-xml holding HTML children was an integration point, which
    // depends on the encoding attribute stripped earlier.
    if (n.name == "annotation-xml" &&
        std::any_of(n.children.begin(), n.children.end(), [&](std::size_t c) {
          return html::breaks_out_of_foreign_content(doc.node(c).name);
        })) {
      out += " encoding=\"text/html\"";
    }
    out += ">";
    stack.push_back({s.id, true});
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) {
      stack.push_back({*it, false});
    }
  }
  return out;
}

bool isomorphic(const CleanDocument& a, const CleanDocument& b) {
  if (a.size() != b.size()) return false;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{a.root(), b.root()}};
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    const auto& nx = a.node(x);
    const auto& ny = b.node(y);
    if (nx.name != ny.name || nx.children.size() != ny.children.size()) return false;
    for (std::size_t i = 0; i < nx.children.size(); ++i) {
      stack.emplace_back(nx.children[i], ny.children[i]);
    }
  }
  return true;
}

}  // namespace hdna
