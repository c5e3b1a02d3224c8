#include "hdna/diff.hpp"

#include <algorithm>

#include "hdna/error.hpp"

namespace hdna {

std::string_view to_string(ChangeStatus status) {
  switch (status) {
    case ChangeStatus::kChanged: return "changed";
    case ChangeStatus::kAdded: return "added";
    case ChangeStatus::kRemoved: return "removed";
  }
  return "?";
}

bool quick_changed(const Fingerprint& a, const Fingerprint& b) {
  if (a.version != b.version) {
    throw Error(ErrorKind::kVersionMismatch,
                "fingerprint versions differ: " + a.version + " vs " + b.version);
  }
  return a.digest != b.digest;
}

DiffReport diff(std::span<const WeightedNode> old_nodes, std::span<const WeightedNode> new_nodes) {
  DiffReport report;
  const std::size_t common = std::min(old_nodes.size(), new_nodes.size());
  for (std::size_t n = 0; n < common; ++n) {
    const auto& o = old_nodes[n];
    const auto& w = new_nodes[n];
    if (o.triple == w.triple) continue;
    report.entries.push_back({n, ChangeStatus::kChanged, o.triple, w.triple, o.weight});
  }
  for (std::size_t n = common; n < old_nodes.size(); ++n) {
    const auto& o = old_nodes[n];
    report.entries.push_back({n, ChangeStatus::kRemoved, o.triple, std::nullopt, o.weight});
  }
  for (std::size_t n = common; n < new_nodes.size(); ++n) {
    const auto& w = new_nodes[n];
    report.entries.push_back({n, ChangeStatus::kAdded, std::nullopt, w.triple, w.weight});
  }

  report.identical = report.entries.empty();
  for (const auto& e : report.entries) report.raw_score += e.weight_contribution;

  const double denom = std::max(total_weight(old_nodes), total_weight(new_nodes));
  if (denom > 0.0) {
    report.normalized_score = std::clamp(report.raw_score / denom, 0.0, 1.0);
  } else {
    report.normalized_score = report.identical ? 0.0 : 1.0;
  }
  return report;
}

}  // namespace hdna
