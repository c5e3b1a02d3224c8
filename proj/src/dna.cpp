#include "hdna/dna.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <memory>

#include "hdna/error.hpp"

namespace hdna {
namespace {

void append_escaped(std::string& out, std::string_view name) {
  for (char c : name) {
    if (c == '%') {
      out += "%25";
    } else if (c == ';') {
      out += "%3B";
    } else {
      out.push_back(c);
    }
  }
}

std::string unescape(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '%') {
      out.push_back(s[i]);
      continue;
    }
    std::string_view code = s.substr(i + 1, 2);
    if (code == "25") {
      out.push_back('%');
    } else if (code == "3B") {
      out.push_back(';');
    } else {
      throw Error(ErrorKind::kCorruptBaseline, "bad escape in canonical name");
    }
    i += 2;
  }
  return out;
}

std::size_t parse_size(std::string_view s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::kCorruptBaseline, "bad number in canonical: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

double node_weight(std::size_t d, std::size_t n, std::size_t depth) {
  if (n == 0) return static_cast<double>(d);
  return static_cast<double>(d) / (static_cast<double>(n) * static_cast<double>(depth));
}

std::vector<WeightedNode> dna_of(const DomTree& tree) {
  std::vector<WeightedNode> out;
  out.reserve(tree.nodes.size());
  for (const auto& rec : tree.nodes) {
    out.push_back({{rec.d, rec.n, rec.name}, rec.depth, node_weight(rec.d, rec.n, rec.depth)});
  }
  return out;
}

double total_weight(std::span<const WeightedNode> nodes) {
  double sum = 0.0;
  for (const auto& w : nodes) {
    if (w.triple.n != 0) sum += w.weight;
  }
  return sum;
}

std::string canonical_string(std::span<const DnaTriple> entries) {
  std::string out{kFingerprintVersion};
  out.push_back('|');
  bool first = true;
  for (const auto& t : entries) {
    if (!first) out.push_back(';');
    first = false;
    append_escaped(out, t.a);
    out += ':' + std::to_string(t.n) + ':' + std::to_string(t.d);
  }
  return out;
}

std::vector<DnaTriple> parse_canonical(std::string_view canonical) {
  std::string prefix{kFingerprintVersion};
  prefix.push_back('|');
  if (!canonical.starts_with(prefix)) {
    throw Error(ErrorKind::kCorruptBaseline, "canonical string lacks the version prefix");
  }
  canonical.remove_prefix(prefix.size());
  std::vector<DnaTriple> out;
  if (canonical.empty()) return out;
  for (;;) {
    std::size_t semi = canonical.find(';');
    std::string_view entry = canonical.substr(0, semi);
    // Names may contain ':'; the last two fields are numeric.
    std::size_t c2 = entry.rfind(':');
    std::size_t c1 = c2 == std::string_view::npos || c2 == 0 ? std::string_view::npos
                                                              : entry.rfind(':', c2 - 1);
    if (c1 == std::string_view::npos) {
      throw Error(ErrorKind::kCorruptBaseline, "malformed canonical entry");
    }
    out.push_back({parse_size(entry.substr(c2 + 1)), parse_size(entry.substr(c1 + 1, c2 - c1 - 1)),
                   unescape(entry.substr(0, c1))});
    if (semi == std::string_view::npos) break;
    canonical.remove_prefix(semi + 1);
  }
  return out;
}

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

Fingerprint fingerprint(const DomTree& tree) {
  Fingerprint fp;
  fp.entries.reserve(tree.nodes.size());
  for (const auto& rec : tree.nodes) fp.entries.push_back({rec.d, rec.n, rec.name});
  fp.canonical = canonical_string(fp.entries);
  fp.digest = sha256_hex(fp.canonical);
  return fp;
}

}  // namespace hdna
