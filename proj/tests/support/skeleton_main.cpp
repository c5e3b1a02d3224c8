// Reads HTML on stdin and prints the parsed element skeleton, one document
// per NUL-separated input record. Used to compare against the html5lib
// oracle in tests/oracle.
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include "hdna/html/parser.hpp"
#include "skeleton.hpp"

int main() {
  std::string all((std::istreambuf_iterator<char>(std::cin)), std::istreambuf_iterator<char>());
  std::size_t start = 0;
  while (start <= all.size()) {
    std::size_t end = all.find('\x1e', start);
    if (end == std::string::npos) end = all.size();
    std::cout << hdna::testing::skeleton(
                     hdna::html::parse_document(std::string_view(all).substr(start, end - start)))
              << '\n';
    start = end + 1;
  }
}
