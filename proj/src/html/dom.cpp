#include "hdna/html/dom.hpp"

#include <algorithm>
#include <cassert>
#include <utility>

namespace hdna::html {

Document::Document() {
  Node doc;
  doc.kind = NodeKind::kDocument;
  doc.name = "#document";
  nodes_.push_back(std::move(doc));
}

NodeId Document::create(NodeKind kind, std::string name, Namespace ns) {
  Node n;
  n.kind = kind;
  n.ns = ns;
  n.name = std::move(name);
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

void Document::append_child(NodeId parent, NodeId child) {
  insert_before(parent, child, kNoNode);
}

void Document::insert_before(NodeId parent, NodeId child, NodeId before) {
  detach(child);
  auto& kids = nodes_[parent].children;
  auto pos = before == kNoNode ? kids.end()
                               : std::find(kids.begin(), kids.end(), before);
  kids.insert(pos, child);
  nodes_[child].parent = parent;
}

void Document::detach(NodeId child) {
  NodeId parent = nodes_[child].parent;
  if (parent == kNoNode) return;
  auto& kids = nodes_[parent].children;
  kids.erase(std::find(kids.begin(), kids.end(), child));
  nodes_[child].parent = kNoNode;
}

std::vector<NodeId> Document::preorder() const {
  std::vector<NodeId> out;
  std::vector<NodeId> stack{root()};
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    out.push_back(id);
    const auto& kids = nodes_[id].children;
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

Document Document::compact() const {
  Document out;
  out.nodes_.clear();
  std::vector<NodeId> order = preorder();
  std::vector<NodeId> remap(nodes_.size(), kNoNode);
  for (std::size_t i = 0; i < order.size(); ++i) {
    remap[order[i]] = static_cast<NodeId>(i);
  }
  out.nodes_.reserve(order.size());
  for (NodeId old : order) {
    Node copy = nodes_[old];
    copy.parent = copy.parent == kNoNode ? kNoNode : remap[copy.parent];
    for (auto& c : copy.children) c = remap[c];
    out.nodes_.push_back(std::move(copy));
  }
  return out;
}

bool is_element(const Node& n) noexcept { return n.kind == NodeKind::kElement; }

}  // namespace hdna::html
