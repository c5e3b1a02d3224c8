#include "hdna/dom_tree.hpp"

#include <deque>
#include <utility>

namespace hdna {

DomTree build_tree(const CleanDocument& doc, std::string source_label) {
  DomTree tree;
  tree.source_label = std::move(source_label);
  tree.nodes.reserve(doc.size());

  // Breadth-first walk; each dequeued node gets the next count number.
  // Entries are (document node, parent's count number).
  std::deque<std::pair<std::size_t, std::optional<std::size_t>>> queue;
  queue.emplace_back(doc.root(), std::nullopt);
  while (!queue.empty()) {
    auto [id, parent] = queue.front();
    queue.pop_front();
    const std::size_t n = tree.nodes.size();
    NodeRecord rec;
    rec.name = doc.node(id).name;
    rec.n = n;
    rec.parent = parent;
    if (parent) {
      rec.depth = tree.nodes[*parent].depth + 1;
      tree.nodes[*parent].children.push_back(n);
    }
    tree.nodes.push_back(std::move(rec));
    for (std::size_t child : doc.node(id).children) queue.emplace_back(child, n);
  }

  // Children always carry larger numbers than their parent, so one
  // reverse sweep accumulates subtree sizes bottom-up.
  for (std::size_t n = tree.nodes.size(); n-- > 1;) {
    const auto& rec = tree.nodes[n];
    tree.nodes[*rec.parent].d += rec.d + 1;
  }
  return tree;
}

}  // namespace hdna
