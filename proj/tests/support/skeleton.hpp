#pragma once

#include <string>
#include <vector>

#include "hdna/html/dom.hpp"
#include "hdna/preprocess.hpp"

namespace hdna::testing {

// "(html(head)(body(p)))" style rendering of the element skeleton.
inline std::string skeleton(const html::Document& doc) {
  std::string out;
  struct Step {
    html::NodeId id;
    bool close;
  };
  std::vector<Step> stack;
  const auto& kids = doc.node(doc.root()).children;
  for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back({*it, false});
  while (!stack.empty()) {
    Step s = stack.back();
    stack.pop_back();
    if (s.close) {
      out += ')';
      continue;
    }
    const auto& n = doc.node(s.id);
    if (n.kind != html::NodeKind::kElement) continue;
    out += '(' + n.name;
    stack.push_back({s.id, true});
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) {
      stack.push_back({*it, false});
    }
  }
  return out;
}

inline std::string skeleton(const CleanDocument& doc) {
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
    if (s.close) {
      out += ')';
      continue;
    }
    const auto& n = doc.node(s.id);
    out += '(' + n.name;
    stack.push_back({s.id, true});
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) {
      stack.push_back({*it, false});
    }
  }
  return out;
}

}  // namespace hdna::testing
