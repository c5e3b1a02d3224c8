#include "hdna/dot.hpp"

#include <cstdio>

namespace hdna {
namespace {

std::string quoted(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string to_dot(const DomTree& tree, std::span<const WeightedNode> weights,
                   const DotOptions& options) {
  std::string out = "digraph hdna {\n  node [shape=box];\n";
  for (const auto& rec : tree.nodes) {
    std::string label = rec.name + " n=" + std::to_string(rec.n) + " d=" + std::to_string(rec.d);
    if (options.show_weights) {
      char buf[64];
      std::snprintf(buf, sizeof buf, " w=%.4f", rec.n < weights.size() ? weights[rec.n].weight : 0.0);
      label += buf;
    }
    out += "  n" + std::to_string(rec.n) + " [label=" + quoted(label) + "];\n";
  }
  for (const auto& rec : tree.nodes) {
    for (std::size_t child : rec.children) {
      out += "  n" + std::to_string(rec.n) + " -> n" + std::to_string(child) + ";\n";
    }
  }
  out += "}\n";
  return out;
}

}  // namespace hdna
