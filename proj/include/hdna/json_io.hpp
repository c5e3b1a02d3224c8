#pragma once

#include <json.hpp>

#include "hdna/diff.hpp"
#include "hdna/dna.hpp"

namespace hdna {

// {"a": ..., "n": ..., "d": ...}
void to_json(nlohmann::json& j, const DnaTriple& t);
void from_json(const nlohmann::json& j, DnaTriple& t);

// {"n", "status", "old", "new", "weight_contribution"}; absent sides are null.
void to_json(nlohmann::json& j, const ChangeEntry& e);
void from_json(const nlohmann::json& j, ChangeEntry& e);

// {"identical", "raw_score", "normalized_score", "entries"}
void to_json(nlohmann::json& j, const DiffReport& r);

// Fingerprint document written by the CLI: source, version, canonical,
// digest, node_count, total_weight and, with include_nodes, a "nodes" array
// of {n, a, d, depth, weight}.
nlohmann::json fingerprint_json(const DomTree& tree, const Fingerprint& fp,
                                std::span<const WeightedNode> nodes, bool include_nodes);

}  // namespace hdna
