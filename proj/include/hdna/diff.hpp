#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hdna/dna.hpp"

namespace hdna {

enum class ChangeStatus { kChanged, kAdded, kRemoved };

std::string_view to_string(ChangeStatus status);

struct ChangeEntry {
  std::size_t n = 0;
  ChangeStatus status = ChangeStatus::kChanged;
  std::optional<DnaTriple> old_triple;
  std::optional<DnaTriple> new_triple;
  double weight_contribution = 0.0;  // old-side weight when there is one
};

struct DiffReport {
  std::vector<ChangeEntry> entries;  // ascending n
  double raw_score = 0.0;
  double normalized_score = 0.0;  // in [0, 1]
  bool identical = true;
};

// True iff the digests differ. Throws Error(kVersionMismatch) when the
// fingerprints come from different canonical formats.
bool quick_changed(const Fingerprint& a, const Fingerprint& b);

// Aligns nodes by count number. Each list must be ordered by n with
// n == index; only the triple and weight of each node are read.
DiffReport diff(std::span<const WeightedNode> old_nodes, std::span<const WeightedNode> new_nodes);

inline DiffReport diff(const DomTree& old_tree, const DomTree& new_tree) {
  return diff(dna_of(old_tree), dna_of(new_tree));
}

}  // namespace hdna
