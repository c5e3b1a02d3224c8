#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hdna/dom_tree.hpp"

namespace hdna {

inline constexpr std::string_view kFingerprintVersion = "hdna1";

struct DnaTriple {
  std::size_t d = 0;
  std::size_t n = 0;
  std::string a;

  bool operator==(const DnaTriple&) const = default;
};

struct WeightedNode {
  DnaTriple triple;
  std::size_t depth = 0;
  double weight = 0.0;
};

struct Fingerprint {
  std::string version{kFingerprintVersion};
  std::vector<DnaTriple> entries;
  std::string canonical;
  std::string digest;  // lowercase hex SHA-256 of canonical

  bool operator==(const Fingerprint&) const = default;
};

// d / (n * depth); the root (n == 0) weighs d.
double node_weight(std::size_t d, std::size_t n, std::size_t depth);

std::vector<WeightedNode> dna_of(const DomTree& tree);

Fingerprint fingerprint(const DomTree& tree);

// Sum over non-root nodes.
double total_weight(std::span<const WeightedNode> nodes);

// "hdna1|a:n:d;a:n:d;...". '%' and ';' inside names are percent-encoded so
// distinct entry lists never render to the same string.
std::string canonical_string(std::span<const DnaTriple> entries);

// Inverse of canonical_string. Throws Error(kCorruptBaseline) on bad input.
std::vector<DnaTriple> parse_canonical(std::string_view canonical);

std::string sha256_hex(std::string_view data);

}  // namespace hdna
