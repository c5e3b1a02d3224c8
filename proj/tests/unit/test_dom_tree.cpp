#include <doctest.h>

#include <random>

#include "hdna/dom_tree.hpp"
#include "support/oracle.hpp"

using namespace hdna;

namespace {

CleanDocument five_node() {
  CleanDocument doc;
  auto html = doc.add_child(doc.root(), "html");
  doc.add_child(html, "head");
  auto body = doc.add_child(html, "body");
  doc.add_child(body, "p");
  return doc;
}

}  // namespace

TEST_CASE("build_tree examples") {
  CleanDocument lone;
  lone.add_child(lone.root(), "html");
  DomTree t = build_tree(lone, "x");
  REQUIRE(node_count(t) == 2);
  CHECK(t.source_label == "x");
  CHECK(t.nodes[0].name == "document");
  CHECK(t.nodes[0].d == 1);
  CHECK(t.nodes[1].depth == 1);
  CHECK(t.nodes[1].d == 0);

  DomTree five = build_tree(five_node());
  REQUIRE(node_count(five) == 5);
  const char* names[] = {"document", "html", "head", "body", "p"};
  const std::size_t depth[] = {0, 1, 2, 2, 3};
  const std::size_t d[] = {4, 3, 0, 1, 0};
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(five.nodes[i].n == i);
    CHECK(five.nodes[i].name == names[i]);
    CHECK(five.nodes[i].depth == depth[i]);
    CHECK(five.nodes[i].d == d[i]);
  }

  CleanDocument wide;
  auto html = wide.add_child(wide.root(), "html");
  auto head = wide.add_child(html, "head");
  auto body = wide.add_child(html, "body");
  wide.add_child(head, "title");
  wide.add_child(body, "div");
  wide.add_child(body, "div");
  DomTree w = build_tree(wide);
  CHECK(w.nodes[2].name == "head");
  CHECK(w.nodes[3].name == "body");
  CHECK(w.nodes[4].name == "title");
  CHECK(w.nodes[5].name == "div");
  CHECK(w.nodes[6].name == "div");
  CHECK(w.nodes[3].children == std::vector<std::size_t>{5, 6});

  CHECK(node_count(build_tree(CleanDocument{})) == 1);
}

TEST_CASE("random trees agree with the numbering and measure oracles") {
  std::mt19937_64 rng(20240501);
  for (int iter = 0; iter < 1000; ++iter) {
    auto ref = oracle::random_tree(rng, 200);
    DomTree tree = build_tree(oracle::to_clean(ref));
    auto want = oracle::reference_dna(ref);
    REQUIRE(node_count(tree) == ref.size());
    for (std::size_t k = 0; k < want.size(); ++k) {
      const auto& got = tree.nodes[k];
      REQUIRE(got.n == k);
      CHECK(got.name == want[k].a);
      CHECK(got.depth == want[k].depth);
      CHECK(got.d == want[k].d);
      if (k > 0) {
        REQUIRE(got.parent.has_value());
        CHECK(tree.nodes[*got.parent].depth + 1 == got.depth);
      }
      std::size_t sum = 0;
      for (auto c : got.children) sum += tree.nodes[c].d + 1;
      CHECK(got.d == sum);
    }
  }
}

TEST_CASE("tree nodes correspond one-to-one with document elements") {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 200; ++iter) {
    auto ref = oracle::random_tree(rng, 60);
    CleanDocument doc = oracle::to_clean(ref);
    DomTree tree = build_tree(doc);
    // Map each count number back to a document node through the oracle's
    // level order, then compare parent links.
    auto order = oracle::level_order(ref);
    std::vector<std::size_t> n_of(ref.size());
    for (std::size_t k = 0; k < order.size(); ++k) n_of[order[k]] = k;
    for (std::size_t v = 1; v < ref.size(); ++v) {
      CHECK(tree.nodes[n_of[v]].parent == n_of[ref.parent[v]]);
    }
  }
}
