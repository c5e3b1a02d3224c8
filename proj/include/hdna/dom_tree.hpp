#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hdna/preprocess.hpp"

namespace hdna {

struct NodeRecord {
  std::string name;
  std::size_t n = 0;      // level-order count number, root = 0
  std::size_t depth = 0;  // edges from the root
  std::size_t d = 0;      // proper descendants
  std::optional<std::size_t> parent;
  std::vector<std::size_t> children;
};

// nodes[i].n == i. nodes[0] is the document root.
struct DomTree {
  std::vector<NodeRecord> nodes;
  std::string source_label;
};

DomTree build_tree(const CleanDocument& doc, std::string source_label = {});

inline std::size_t node_count(const DomTree& tree) { return tree.nodes.size(); }

}  // namespace hdna
