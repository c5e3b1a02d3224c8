#include "hdna/json_io.hpp"

namespace hdna {

void to_json(nlohmann::json& j, const DnaTriple& t) {
  j = nlohmann::json{{"a", t.a}, {"n", t.n}, {"d", t.d}};
}

void from_json(const nlohmann::json& j, DnaTriple& t) {
  j.at("a").get_to(t.a);
  j.at("n").get_to(t.n);
  j.at("d").get_to(t.d);
}

void to_json(nlohmann::json& j, const ChangeEntry& e) {
  j = nlohmann::json{{"n", e.n},
                     {"status", std::string(to_string(e.status))},
                     {"old", e.old_triple ? nlohmann::json(*e.old_triple) : nlohmann::json()},
                     {"new", e.new_triple ? nlohmann::json(*e.new_triple) : nlohmann::json()},
                     {"weight_contribution", e.weight_contribution}};
}

void from_json(const nlohmann::json& j, ChangeEntry& e) {
  j.at("n").get_to(e.n);
  const auto status = j.at("status").get<std::string>();
  if (status == "changed") {
    e.status = ChangeStatus::kChanged;
  } else if (status == "added") {
    e.status = ChangeStatus::kAdded;
  } else if (status == "removed") {
    e.status = ChangeStatus::kRemoved;
  } else {
    throw nlohmann::json::other_error::create(501, "unknown change status " + status, &j);
  }
  e.old_triple.reset();
  e.new_triple.reset();
  if (!j.at("old").is_null()) e.old_triple = j.at("old").get<DnaTriple>();
  if (!j.at("new").is_null()) e.new_triple = j.at("new").get<DnaTriple>();
  j.at("weight_contribution").get_to(e.weight_contribution);
}

void to_json(nlohmann::json& j, const DiffReport& r) {
  j = nlohmann::json{{"identical", r.identical},
                     {"raw_score", r.raw_score},
                     {"normalized_score", r.normalized_score},
                     {"entries", r.entries}};
}

nlohmann::json fingerprint_json(const DomTree& tree, const Fingerprint& fp,
                                std::span<const WeightedNode> nodes, bool include_nodes) {
  nlohmann::json j{{"source", tree.source_label},
                   {"version", fp.version},
                   {"canonical", fp.canonical},
                   {"digest", fp.digest},
                   {"node_count", node_count(tree)},
                   {"total_weight", total_weight(nodes)}};
  if (include_nodes) {
    auto arr = nlohmann::json::array();
    for (const auto& w : nodes) {
      arr.push_back({{"n", w.triple.n},
                     {"a", w.triple.a},
                     {"d", w.triple.d},
                     {"depth", w.depth},
                     {"weight", w.weight}});
    }
    j["nodes"] = std::move(arr);
  }
  return j;
}

}  // namespace hdna
