#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace hdna::testing {

inline std::filesystem::path fixtures_dir() { return HDNA_FIXTURES_DIR; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::vector<std::filesystem::path> html_files(const std::string& sub) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(fixtures_dir() / sub)) {
    if (e.path().extension() == ".html") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Lines of parse_expected.tsv: relative path, parse skeleton, clean skeleton.
struct ExpectedParse {
  std::string path;
  std::string parsed;
  std::string clean;
};

inline std::vector<ExpectedParse> expected_parses() {
  std::vector<ExpectedParse> out;
  std::istringstream in(slurp(fixtures_dir() / "parse_expected.tsv"));
  std::string line;
  while (std::getline(in, line)) {
    auto t1 = line.find('\t');
    auto t2 = line.find('\t', t1 + 1);
    out.push_back({line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1), line.substr(t2 + 1)});
  }
  return out;
}

}  // namespace hdna::testing
