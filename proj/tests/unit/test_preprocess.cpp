#include <doctest.h>

#include <random>

#include "hdna/error.hpp"
#include "hdna/html/parser.hpp"
#include "hdna/preprocess.hpp"
#include "support/fixtures.hpp"
#include "support/skeleton.hpp"
#include "support/tag_soup.hpp"

using namespace hdna;
using hdna::testing::skeleton;

namespace {

std::string parsed(std::string_view html) { return skeleton(html::parse_document(html)); }

std::string cleaned(std::string_view html) {
  return skeleton(preprocess({std::string(html), std::nullopt}));
}

// Every node in the html::Document that is not an element, has attributes
// or is in the removal set.
int violations(const html::Document& doc) {
  int bad = 0;
  for (auto id : doc.preorder()) {
    if (id == doc.root()) continue;
    const auto& n = doc.node(id);
    if (n.kind != html::NodeKind::kElement) {
      ++bad;
    } else if (!n.attributes.empty() || default_removal_set().contains(n.name)) {
      ++bad;
    }
  }
  return bad;
}

int removal_hits(const CleanDocument& doc) {
  int hits = 0;
  for (std::size_t i = 0; i < doc.size(); ++i) hits += default_removal_set().contains(doc.node(i).name);
  return hits;
}

}  // namespace

TEST_CASE("parse_html examples") {
  CHECK(parsed("<p>hi</p>") == "(html(head)(body(p)))");
  CHECK(parsed("") == "(html(head)(body))");
  CHECK(parsed("<div><span></div>") == "(html(head)(body(div(span))))");

  auto doc = html::parse_document("<p>hi</p>");
  bool saw_text = false;
  for (auto id : doc.preorder()) {
    const auto& n = doc.node(id);
    if (n.kind == html::NodeKind::kText) {
      saw_text = true;
      CHECK(n.data == "hi");
      CHECK(doc.node(n.parent).name == "p");
    }
  }
  CHECK(saw_text);
}

TEST_CASE("parser agrees with the frozen reference parses") {
  auto expected = hdna::testing::expected_parses();
  REQUIRE(expected.size() >= 25);
  for (const auto& e : expected) {
    CAPTURE(e.path);
    const std::string bytes = hdna::testing::slurp(hdna::testing::fixtures_dir() / e.path);
    CHECK(skeleton(parse_html({bytes, std::nullopt})) == e.parsed);
    CHECK(skeleton(preprocess({bytes, std::nullopt})) == e.clean);
  }
}

// Places where the reference parser predates the current tree-construction
// rules; expectations are worked by hand from the current algorithm.
TEST_CASE("current tree-construction rules") {
  // template contents live under the template element
  CHECK(parsed("<template><p>x</p></template>") == "(html(head(template(p)))(body))");
  CHECK(parsed("<body><template><td>x</template>") == "(html(head)(body(template(td))))");
  // textarea text does not reconstruct formatting elements
  CHECK(parsed("<p><a></p><textarea>x</textarea>") == "(html(head)(body(p(a))(textarea)))");
  // </br> acts as <br>, which clears frameset-ok
  CHECK(parsed("</br><frameset>") == "(html(head)(body(br)))");
  // svg desc is special, so </svg> from inside it is ignored
  CHECK(parsed("<svg><desc><span></svg><section>") ==
        "(html(head)(body(svg(desc(span(section))))))");
  // </p> breaks out of foreign content
  CHECK(parsed("<svg><g></p>x") == "(html(head)(body(svg(g))(p)))");
  // rb closes an open optgroup when a ruby is in scope
  CHECK(parsed("<ruby><optgroup><rb>") == "(html(head)(body(ruby(optgroup)(rb))))");
  // fostered list items keep being fostered after the implied end tag
  CHECK(parsed("<table><dt><dt>") == "(html(head)(body(dt)(dt)(table)))");
  // whitespace in a table reconstructs formatting when the current node is
  // not table-related
  CHECK(parsed("<table><p><big></p><nav> <form>") ==
        "(html(head)(body(p(big))(nav(big(form)))(table)))");
}

TEST_CASE("remove_tags") {
  auto tree = html::parse_document("<body><script>x</script><p>y</p></body>");
  CHECK(skeleton(remove_tags(tree)) == "(html(head)(body(p)))");
  CHECK(skeleton(remove_tags(tree, RemovalSet{})) == skeleton(tree));

  auto styled = html::parse_document("<div><style><span></span></style></div>");
  CHECK(skeleton(remove_tags(styled)) == "(html(head)(body(div)))");

  // Whole subtree goes, even for an element the parser let contain markup.
  auto nested = html::parse_document("<div><input><br><p>kept</p></div><hr>");
  CHECK(skeleton(remove_tags(nested)) == "(html(head)(body(div(p))))");

  auto custom = html::parse_document("<div><span><b></b></span><i></i></div>");
  CHECK(skeleton(remove_tags(custom, RemovalSet{"span"})) == "(html(head)(body(div(i))))");
}

TEST_CASE("strip_attributes") {
  auto tree = html::parse_document("<div id=\"x\" class=\"y\"></div><a href=\"u\"><img src=\"s\"></a>");
  auto stripped = strip_attributes(tree);
  for (auto id : stripped.preorder()) CHECK(stripped.node(id).attributes.empty());
  CHECK(skeleton(stripped) == skeleton(tree));

  auto plain = html::parse_document("<p></p>");
  CHECK(skeleton(strip_attributes(plain)) == skeleton(plain));
}

TEST_CASE("strip_text") {
  auto doc = strip_text(html::parse_document("<p>hello <b>world</b></p>"));
  CHECK(skeleton(doc) == "(html(head)(body(p(b))))");
  CHECK(skeleton(strip_text(html::parse_document("<p></p>"))) == "(html(head)(body(p)))");
  CHECK(skeleton(strip_text(html::parse_document("<div><!-- c -->text<span></span></div>"))) ==
        "(html(head)(body(div(span))))");
  CHECK(doc.node(doc.root()).name == "document");
}

TEST_CASE("preprocess examples") {
  CHECK(cleaned("<html><head><meta charset=\"utf-8\"><title>T</title></head><body><p>x</p></body></html>") ==
        "(html(head(title))(body(p)))");
  CHECK(cleaned("<body><br><hr></body>") == "(html(head)(body))");
  CHECK(serialize(preprocess({"<p>x</p>", std::nullopt})) ==
        "<html><head></head><body><p></p></body></html>");
}

TEST_CASE("preprocess invariants over fixtures and random tag soup") {
  std::vector<std::string> inputs;
  for (const auto& sub : {"snippets", "corpus"}) {
    for (const auto& p : hdna::testing::html_files(sub)) inputs.push_back(hdna::testing::slurp(p));
  }
  const std::size_t fixture_count = inputs.size();
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) inputs.push_back(hdna::testing::tag_soup(rng));

  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& in = inputs[i];
    const RawHtml raw{in, std::nullopt};
    auto intermediate = strip_attributes(remove_tags(parse_html(raw)));
    CleanDocument clean = preprocess(raw);
    CHECK(removal_hits(clean) == 0);
    // Everything except text and other non-element nodes is gone.
    int non_elements = 0;
    for (auto id : intermediate.preorder()) {
      if (id != intermediate.root() && intermediate.node(id).kind != html::NodeKind::kElement) {
        ++non_elements;
      }
    }
    CHECK(violations(intermediate) == non_elements);
    CHECK(skeleton(strip_text(intermediate)) == skeleton(clean));

    CleanDocument again = preprocess({serialize(clean), std::nullopt});
    if (i < fixture_count) {
      CHECK(isomorphic(clean, again));
    } else {
      // Foster-parented soup can yield trees no markup reparses to; one
      // round trip reaches a fixed point.
      CHECK(isomorphic(again, preprocess({serialize(again), std::nullopt})));
    }
  }
}

TEST_CASE("foster parenting builds skeletons markup cannot reproduce") {
  for (const char* in : {"<a><table><a></a></table></a>", "<p><table><li></table>"}) {
    CAPTURE(in);
    CleanDocument clean = preprocess({in, std::nullopt});
    CleanDocument again = preprocess({serialize(clean), std::nullopt});
    CHECK_FALSE(isomorphic(clean, again));
    CHECK(isomorphic(again, preprocess({serialize(again), std::nullopt})));
  }
}

TEST_CASE("annotation-xml integration point survives attribute stripping") {
  CleanDocument clean =
      preprocess({"<math><annotation-xml encoding='text/html'><div></div></annotation-xml></math>",
                  std::nullopt});
  CHECK(serialize(clean) ==
        "<html><head></head><body><math><annotation-xml encoding=\"text/html\"><div></div>"
        "</annotation-xml></math></body></html>");
  CHECK(isomorphic(clean, preprocess({serialize(clean), std::nullopt})));
}

TEST_CASE("order of surviving siblings follows the parse") {
  // Removal-set subtrees dropped from the parse skeleton must give exactly
  // the clean skeleton; a reordering would show up as a mismatch.
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const std::string in = hdna::testing::tag_soup(rng);
    auto tree = parse_html({in, std::nullopt});
    CleanDocument clean = preprocess({in, std::nullopt});
    std::vector<std::string> names_parse;
    std::vector<std::string> names_clean;
    auto removed = remove_tags(tree);
    for (auto id : removed.preorder()) {
      if (removed.node(id).kind == html::NodeKind::kElement) names_parse.push_back(removed.node(id).name);
    }
    std::vector<std::size_t> stack{clean.root()};
    while (!stack.empty()) {
      auto id = stack.back();
      stack.pop_back();
      if (id != clean.root()) names_clean.push_back(clean.node(id).name);
      const auto& kids = clean.node(id).children;
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
    }
    CHECK(names_parse == names_clean);
  }
}

TEST_CASE("charset handling") {
  // windows-1252 e-acute declared by the transport
  RawHtml latin{"<p>caf\xE9</p>", std::string("ISO-8859-1")};
  CHECK(html::decode_to_utf8(latin) == "<p>caf\xC3\xA9</p>");

  RawHtml meta{"<meta charset=windows-1252><p>\xE9</p>", std::nullopt};
  CHECK(html::decode_to_utf8(meta).find("\xC3\xA9") != std::string::npos);

  RawHtml bom{"\xEF\xBB\xBF<p>x</p>", std::string("windows-1252")};
  CHECK(html::decode_to_utf8(bom) == "<p>x</p>");

  RawHtml utf16{std::string("\xFF\xFE<\0p\0>\0", 8), std::nullopt};
  CHECK(html::decode_to_utf8(utf16) == "<p>");

  RawHtml broken{"<p>\xFF</p>", std::nullopt};
  CHECK(html::decode_to_utf8(broken) == "<p>\xEF\xBF\xBD</p>");

  RawHtml unknown_ok{"<p>x</p>", std::string("x-no-such-charset")};
  CHECK(html::decode_to_utf8(unknown_ok) == "<p>x</p>");

  RawHtml unknown_bad{"<p>\xFF\xFE\xFD</p>", std::string("x-no-such-charset")};
  try {
    (void)preprocess(unknown_bad);
    FAIL("expected CharsetUndecodable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kCharsetUndecodable);
  }

  CHECK(html::charset_from_content_type("text/html; charset=\"UTF-8\"") == "UTF-8");
  CHECK(html::charset_from_content_type("text/html;charset=iso-8859-1;x=y") == "iso-8859-1");
  CHECK_FALSE(html::charset_from_content_type("text/html").has_value());
  CHECK(html::prescan_meta_charset("<script><meta charset=x></script><meta http-equiv=Content-Type "
                                   "content='text/html; charset=koi8-r'>") == "koi8-r");
}

TEST_CASE("arbitrary bytes never crash the pipeline") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    std::string bytes(std::uniform_int_distribution<int>(0, 400)(rng), '\0');
    for (auto& c : bytes) c = static_cast<char>(std::uniform_int_distribution<int>(0, 255)(rng));
    if (i % 2) {
      for (std::size_t k = 0; k < bytes.size(); k += 7) bytes[k] = "<>/!-=\"'&"[k % 9];
    }
    CleanDocument doc = preprocess({bytes, std::nullopt});
    CHECK(doc.size() >= 4);
    CHECK(removal_hits(doc) == 0);
  }
}
