#pragma once

#include <string>

#include "support/oracle.hpp"

namespace hdna::testing {

// Monitoring fixture: page A, and page B with the main content block gone.
inline const std::string kPageA =
    "<!DOCTYPE html><html><head><title>Shop</title><meta charset=utf-8>"
    "<link rel=stylesheet href=s.css></head><body>"
    "<div id=nav><a href=/>Home</a><a href=/about>About</a></div>"
    "<div id=main><h1>Welcome</h1><p>Intro <b>bold</b></p>"
    "<ul><li>one</li><li>two</li><li>three</li></ul></div>"
    "<div id=footer><p>c</p><script>track()</script></div></body></html>";

inline const std::string kPageB =
    "<!DOCTYPE html><html><head><title>Shop</title><meta charset=utf-8>"
    "<link rel=stylesheet href=s.css></head><body>"
    "<div id=nav><a href=/>Home</a><a href=/about>About</a></div>"
    "<div id=footer><p>HACKED</p><script>track()</script></div></body></html>";

// The same two pages after preprocessing, written out by hand.
inline oracle::RefTree page_a_tree() {
  oracle::RefTree t;
  auto add = [&](std::string name, std::size_t parent) {
    t.name.push_back(std::move(name));
    t.parent.push_back(parent);
    return t.size() - 1;
  };
  add("document", 0);
  auto html = add("html", 0);
  auto head = add("head", html);
  add("title", head);
  auto body = add("body", html);
  auto nav = add("div", body);
  add("a", nav);
  add("a", nav);
  auto main = add("div", body);
  add("h1", main);
  auto p = add("p", main);
  add("b", p);
  auto ul = add("ul", main);
  add("li", ul);
  add("li", ul);
  add("li", ul);
  auto footer = add("div", body);
  add("p", footer);
  return t;
}

inline oracle::RefTree page_b_tree() { return oracle::remove_subtree(page_a_tree(), 8); }

}  // namespace hdna::testing
