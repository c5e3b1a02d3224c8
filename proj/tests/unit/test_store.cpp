#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <fstream>
#include <json.hpp>
#include <random>

#include "hdna/baseline_store.hpp"
#include "hdna/error.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"
#include "support/temp_dir.hpp"

using namespace hdna;
using hdna::testing::TempDir;

namespace {

BaselineRecord record_for(const std::string& url, const oracle::RefTree& t, const std::string& at) {
  DomTree tree = build_tree(oracle::to_clean(t), url);
  return make_baseline(url, fingerprint(tree), dna_of(tree), at);
}

void flip_canonical_byte(const std::filesystem::path& file) {
  std::string text = hdna::testing::slurp(file);
  auto pos = text.find("\"canonical\": \"hdna1|document");
  REQUIRE(pos != std::string::npos);
  pos += std::string("\"canonical\": \"hdna1|").size();
  text[pos] = text[pos] == 'd' ? 'D' : 'd';
  std::ofstream(file, std::ios::binary | std::ios::trunc) << text;
}

template <typename F>
ErrorKind error_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kIo;
}

}  // namespace

TEST_CASE("round trip of random records") {
  TempDir dir;
  BaselineStore store(dir.path());
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    const std::string url = "https://example.test/page/" + std::to_string(i) + "?q=" + std::to_string(rng());
    auto rec = record_for(url, oracle::random_tree(rng, 150), "2024-01-02T03:04:05.006Z");
    store.save(rec);
    auto back = store.load(url);
    REQUIRE(back.has_value());
    CHECK(*back == rec);
    CHECK(back->fingerprint.digest == rec.fingerprint.digest);
  }
}

TEST_CASE("unknown url, overwrite, file naming") {
  TempDir dir;
  BaselineStore store(dir.path() / "nested" / "store");
  CHECK_FALSE(store.load("https://nowhere.test/").has_value());

  oracle::RefTree small{{"document", "html"}, {0, 0}};
  oracle::RefTree bigger{{"document", "html", "body"}, {0, 0, 1}};
  auto first = record_for("u", small, "t1");
  auto second = record_for("u", bigger, "t2");
  store.save(first);
  store.save(second);
  CHECK(*store.load("u") == second);

  auto name = store.path_for("https://a.test/x?y=z#frag").filename().string();
  CHECK(name.size() == 64 + 5);
  CHECK(name.find_first_not_of("0123456789abcdef") == 64);
  CHECK(store.path_for("a") != store.path_for("b"));

  // Only the final file is left behind.
  int files = 0;
  for (auto& e : std::filesystem::directory_iterator(store.dir())) {
    (void)e;
    ++files;
  }
  CHECK(files == 1);
}

TEST_CASE("field names on disk") {
  TempDir dir;
  BaselineStore store(dir.path());
  store.save(record_for("u", {{"document", "html"}, {0, 0}}, "t"));
  auto j = nlohmann::json::parse(hdna::testing::slurp(store.path_for("u")));
  for (const char* key : {"url", "version", "canonical", "digest", "weights", "total_weight",
                          "created_at", "preprocess_version"}) {
    CHECK(j.contains(key));
  }
  CHECK(j.size() == 8);
  CHECK(j["weights"] == nlohmann::json::parse("[[0, 1.0], [1, 0.0]]"));
}

TEST_CASE("corruption is reported, not hidden") {
  TempDir dir;
  BaselineStore store(dir.path());
  store.save(record_for("u", {{"document", "html", "body"}, {0, 0, 1}}, "t"));
  flip_canonical_byte(store.path_for("u"));
  CHECK(error_kind([&] { store.load("u"); }) == ErrorKind::kCorruptBaseline);

  std::ofstream(store.path_for("v")) << "{ not json";
  CHECK(error_kind([&] { store.load("v"); }) == ErrorKind::kCorruptBaseline);

  std::ofstream(store.path_for("w")) << R"({"url": "w"})";
  CHECK(error_kind([&] { store.load("w"); }) == ErrorKind::kCorruptBaseline);
}

TEST_CASE("crash between temp write and rename keeps the previous record") {
  TempDir dir;
  BaselineStore store(dir.path());
  auto before = record_for("u", {{"document", "html"}, {0, 0}}, "t1");
  auto after = record_for("u", {{"document", "html", "body"}, {0, 0, 1}}, "t2");
  store.save(before);

  SUBCASE("process dies") {
    pid_t pid = fork();
    REQUIRE(pid >= 0);
    if (pid == 0) {
      BaselineStore child(dir.path());
      child.before_rename = [](const std::filesystem::path&) { ::_exit(0); };
      child.save(after);
      ::_exit(1);
    }
    int status = 0;
    ::waitpid(pid, &status, 0);
    CHECK(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);
  }
  SUBCASE("exception") {
    BaselineStore failing(dir.path());
    failing.before_rename = [](const std::filesystem::path& temp) {
      CHECK(std::filesystem::exists(temp));
      throw std::runtime_error("simulated crash");
    };
    CHECK_THROWS(failing.save(after));
  }
  CHECK(*store.load("u") == before);
  // A later save still goes through.
  store.save(after);
  CHECK(*store.load("u") == after);
}

TEST_CASE("unwritable store is an IoError") {
  TempDir dir;
  std::ofstream(dir.path() / "file") << "x";
  BaselineStore store(dir.path() / "file" / "sub");
  CHECK(error_kind([&] { store.save(record_for("u", {{"document"}, {0}}, "t")); }) == ErrorKind::kIo);
}
