#include <doctest.h>

#include <random>
#include <set>

#include "hdna/dna.hpp"
#include "hdna/error.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace hdna;

namespace {

DomTree five_node() {
  CleanDocument doc;
  auto html = doc.add_child(doc.root(), "html");
  doc.add_child(html, "head");
  auto body = doc.add_child(html, "body");
  doc.add_child(body, "p");
  return build_tree(doc);
}

}  // namespace

TEST_CASE("dna_of on the five-node page") {
  auto nodes = dna_of(five_node());
  REQUIRE(nodes.size() == 5);
  CHECK(nodes[0].weight == 4.0);
  CHECK(nodes[1].weight == 3.0);
  CHECK(nodes[2].weight == 0.0);
  CHECK(nodes[3].weight == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(nodes[4].weight == 0.0);
  CHECK(total_weight(nodes) == doctest::Approx(3.0 + 1.0 / 6.0).epsilon(1e-12));
  CHECK(nodes[3].triple == DnaTriple{1, 3, "body"});
}

TEST_CASE("lone root") {
  DomTree lone = build_tree(CleanDocument{});
  auto nodes = dna_of(lone);
  REQUIRE(nodes.size() == 1);
  CHECK(nodes[0].weight == 0.0);
  CHECK(total_weight(nodes) == 0.0);
  Fingerprint fp = fingerprint(lone);
  CHECK(fp.canonical == "hdna1|document:0:0");
  // sha256sum of the canonical string
  CHECK(fp.digest == "3750bdb59b92c3fda39a485de14c3fd19f407acc9317909469a6de3d1ebfcf34");
}

TEST_CASE("sha256 known answers") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("fingerprint of the five-node page") {
  Fingerprint fp = fingerprint(five_node());
  CHECK(fp.version == "hdna1");
  CHECK(fp.canonical == "hdna1|document:0:4;html:1:3;head:2:0;body:3:1;p:4:0");
  CHECK(fp.digest == sha256_hex(fp.canonical));
  CHECK(fp.digest.size() == 64);
  CHECK(parse_canonical(fp.canonical) == fp.entries);
}

TEST_CASE("weights match exact rational arithmetic") {
  std::mt19937_64 rng(99);
  for (int iter = 0; iter < 1000; ++iter) {
    auto ref = oracle::random_tree(rng, 200);
    auto nodes = dna_of(build_tree(oracle::to_clean(ref)));
    auto want = oracle::reference_dna(ref);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const auto& w = want[k];
      CHECK(oracle::relative_close(nodes[k].weight, oracle::exact_weight(w.d, w.n, w.depth)));
      if (w.d == 0) CHECK(nodes[k].weight == 0.0);
    }
    CHECK(nodes[0].weight == static_cast<double>(nodes[0].triple.d));
  }
}

TEST_CASE("weight monotonicity") {
  for (std::size_t n = 1; n < 40; ++n) {
    for (std::size_t depth = 1; depth < 15; ++depth) {
      for (std::size_t d = 0; d < 30; ++d) {
        CHECK(node_weight(d + 1, n, depth) > node_weight(d, n, depth));
        if (d > 0) {
          CHECK(node_weight(d, n + 1, depth) < node_weight(d, n, depth));
          CHECK(node_weight(d, n, depth + 1) < node_weight(d, n, depth));
        }
      }
    }
  }
}

TEST_CASE("canonical strings are injective on structure") {
  std::mt19937_64 rng(1234);
  int distinct_pairs = 0;
  for (int iter = 0; iter < 1500 && distinct_pairs < 1000; ++iter) {
    auto a = oracle::random_tree(rng, 30);
    auto b = oracle::random_tree(rng, 30);
    auto fa = fingerprint(build_tree(oracle::to_clean(a)));
    auto fb = fingerprint(build_tree(oracle::to_clean(b)));
    const bool same = oracle::nested(a) == oracle::nested(b);
    if (same) {
      CHECK(fa.canonical == fb.canonical);
    } else {
      ++distinct_pairs;
      CHECK(fa.canonical != fb.canonical);
    }
  }
  CHECK(distinct_pairs == 1000);

  // Equal trees built twice give byte-equal output.
  for (int iter = 0; iter < 100; ++iter) {
    auto t = oracle::random_tree(rng, 100);
    CHECK(fingerprint(build_tree(oracle::to_clean(t))).canonical ==
          fingerprint(build_tree(oracle::to_clean(t))).canonical);
  }
}

TEST_CASE("separator characters inside names cannot forge entries") {
  CleanDocument a;
  a.add_child(a.root(), "x:1:0;y");
  CleanDocument b;
  auto x = b.add_child(b.root(), "x");
  (void)x;
  b.add_child(b.root(), "y");
  auto fa = fingerprint(build_tree(a));
  auto fb = fingerprint(build_tree(b));
  CHECK(fa.canonical != fb.canonical);
  CHECK(fa.canonical == "hdna1|document:0:1;x:1:0%3By:1:0");
  CHECK(parse_canonical(fa.canonical) == fa.entries);

  CleanDocument c;
  c.add_child(c.root(), "a%3Bb");
  auto fc = fingerprint(build_tree(c));
  CHECK(parse_canonical(fc.canonical) == fc.entries);
}

TEST_CASE("parse_canonical rejects malformed strings") {
  for (const char* bad : {"hdna2|document:0:0", "hdna1|document:0", "hdna1|document:x:0",
                          "hdna1|a:1:0;", "hdna1|a%zz:0:0"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_canonical(bad), Error);
  }
  CHECK(parse_canonical("hdna1|").empty());
}

TEST_CASE("fingerprints of the fixtures are stable across runs") {
  for (const auto& p : hdna::testing::html_files("corpus")) {
    const RawHtml raw{hdna::testing::slurp(p), std::nullopt};
    std::set<std::string> digests;
    for (int i = 0; i < 100; ++i) digests.insert(fingerprint(build_tree(preprocess(raw))).digest);
    CHECK(digests.size() == 1);
  }
}
