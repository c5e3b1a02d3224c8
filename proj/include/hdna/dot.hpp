#pragma once

#include <span>
#include <string>

#include "hdna/dna.hpp"
#include "hdna/dom_tree.hpp"

namespace hdna {

struct DotOptions {
  bool show_weights = false;
};

// One vertex n<k> per node labelled "A n=N d=D" (plus " w=W.WWWW" with
// show_weights), edges in (parent n, child n) order.
std::string to_dot(const DomTree& tree, std::span<const WeightedNode> weights,
                   const DotOptions& options = {});

}  // namespace hdna
