#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hdna::html {

enum class NodeKind : std::uint8_t {
  kDocument,
  kElement,
  kText,
  kComment,
  kDoctype,
  kCData,
  kProcessingInstruction,
};

enum class Namespace : std::uint8_t { kHtml, kSvg, kMathMl };

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

struct Attribute {
  std::string name;
  std::string value;

  bool operator==(const Attribute&) const = default;
};

struct Node {
  NodeKind kind = NodeKind::kElement;
  Namespace ns = Namespace::kHtml;
  std::string name;  // tag name for elements, doctype name for doctypes
  std::string data;  // text / comment payload
  std::vector<Attribute> attributes;
  NodeId parent = kNoNode;
  std::vector<NodeId> children;
};

// Arena-backed node tree. Node 0 is always the document node. Detached
// nodes stay in the arena but are unreachable from the root; every walk
// over the tree is iterative, so arbitrarily deep input cannot exhaust the
// call stack.
class Document {
 public:
  Document();

  NodeId root() const noexcept { return 0; }
  const Node& node(NodeId id) const { return nodes_[id]; }
  Node& node(NodeId id) { return nodes_[id]; }
  std::size_t arena_size() const noexcept { return nodes_.size(); }

  NodeId create(NodeKind kind, std::string name = {},
                Namespace ns = Namespace::kHtml);

  void append_child(NodeId parent, NodeId child);
  // Inserts child immediately before `before` (which must be a child of
  // parent). kNoNode appends.
  void insert_before(NodeId parent, NodeId child, NodeId before);
  void detach(NodeId child);

  // Document-order (pre-order) listing of all nodes reachable from root.
  std::vector<NodeId> preorder() const;

  // Compacts a reachable copy of the tree; node ids are renumbered in
  // pre-order.
  Document compact() const;

 private:
  std::vector<Node> nodes_;
};

bool is_element(const Node& n) noexcept;

}  // namespace hdna::html
