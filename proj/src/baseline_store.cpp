#include "hdna/baseline_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "hdna/error.hpp"
#include "hdna/preprocess.hpp"

namespace hdna {
namespace fs = std::filesystem;
namespace {

[[noreturn]] void io_error(const std::string& what, const fs::path& path) {
  throw Error(ErrorKind::kIo, what + " " + path.string() + ": " + std::strerror(errno));
}

void write_all(int fd, const std::string& data, const fs::path& path) {
  const char* p = data.data();
  std::size_t left = data.size();
  while (left > 0) {
    ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      io_error("write", path);
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
}

void fsync_dir(const fs::path& dir) {
  int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

nlohmann::json to_json(const BaselineRecord& r) {
  auto weights = nlohmann::json::array();
  for (const auto& [n, w] : r.weights) weights.push_back({n, w});
  return {{"url", r.url},
          {"version", r.fingerprint.version},
          {"canonical", r.fingerprint.canonical},
          {"digest", r.fingerprint.digest},
          {"weights", std::move(weights)},
          {"total_weight", r.total_weight},
          {"created_at", r.created_at},
          {"preprocess_version", r.preprocess_version}};
}

BaselineRecord from_json(const nlohmann::json& j) {
  BaselineRecord r;
  j.at("url").get_to(r.url);
  j.at("version").get_to(r.fingerprint.version);
  j.at("canonical").get_to(r.fingerprint.canonical);
  j.at("digest").get_to(r.fingerprint.digest);
  for (const auto& pair : j.at("weights")) {
    if (!pair.is_array() || pair.size() != 2) {
      throw Error(ErrorKind::kCorruptBaseline, "weights entry is not an [n, weight] pair");
    }
    r.weights.emplace_back(pair[0].get<std::size_t>(), pair[1].get<double>());
  }
  j.at("total_weight").get_to(r.total_weight);
  j.at("created_at").get_to(r.created_at);
  j.at("preprocess_version").get_to(r.preprocess_version);
  return r;
}

}  // namespace

BaselineRecord make_baseline(const std::string& url, const Fingerprint& fp,
                             std::span<const WeightedNode> nodes, std::string created_at) {
  BaselineRecord r;
  r.url = url;
  r.fingerprint = fp;
  r.weights.reserve(nodes.size());
  for (const auto& w : nodes) r.weights.emplace_back(w.triple.n, w.weight);
  r.total_weight = total_weight(nodes);
  r.created_at = std::move(created_at);
  r.preprocess_version = std::string(kPreprocessVersion);
  return r;
}

std::vector<WeightedNode> weighted_nodes(const BaselineRecord& record) {
  const auto& entries = record.fingerprint.entries;
  if (entries.size() != record.weights.size()) {
    throw Error(ErrorKind::kCorruptBaseline, "weights do not line up with the canonical string");
  }
  std::vector<WeightedNode> out;
  out.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].n != i || record.weights[i].first != i) {
      throw Error(ErrorKind::kCorruptBaseline, "baseline nodes are not in count-number order");
    }
    out.push_back({entries[i], 0, record.weights[i].second});
  }
  return out;
}

fs::path BaselineStore::path_for(const std::string& url) const {
  return dir_ / (sha256_hex(url) + ".json");
}

void BaselineStore::save(const BaselineRecord& record) const {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir_.string() + ": " + ec.message());

  static std::atomic<unsigned> counter{0};
  const fs::path target = path_for(record.url);
  fs::path temp = target;
  temp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);

  const std::string data = to_json(record).dump(2) + "\n";
  int fd = ::open(temp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) io_error("cannot create", temp);
  try {
    write_all(fd, data, temp);
    if (::fsync(fd) != 0) io_error("fsync", temp);
  } catch (...) {
    ::close(fd);
    fs::remove(temp, ec);
    throw;
  }
  if (::close(fd) != 0) io_error("close", temp);

  if (before_rename) before_rename(temp);

  if (::rename(temp.c_str(), target.c_str()) != 0) {
    int saved = errno;
    fs::remove(temp, ec);
    errno = saved;
    io_error("rename onto", target);
  }
  fsync_dir(dir_);
}

std::optional<BaselineRecord> BaselineStore::load(const std::string& url) const {
  const fs::path path = path_for(url);
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    if (ec) throw Error(ErrorKind::kIo, "cannot stat " + path.string() + ": " + ec.message());
    return std::nullopt;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error("cannot open", path);
  std::stringstream buf;
  buf << in.rdbuf();
  if (in.bad()) io_error("read", path);

  BaselineRecord r;
  try {
    r = from_json(nlohmann::json::parse(buf.str()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kCorruptBaseline, path.string() + ": " + e.what());
  }
  if (sha256_hex(r.fingerprint.canonical) != r.fingerprint.digest) {
    throw Error(ErrorKind::kCorruptBaseline, path.string() + ": digest does not match canonical");
  }
  if (r.url != url) {
    throw Error(ErrorKind::kCorruptBaseline, path.string() + ": record belongs to " + r.url);
  }
  if (r.fingerprint.version == kFingerprintVersion) {
    r.fingerprint.entries = parse_canonical(r.fingerprint.canonical);
  }
  return r;
}

}  // namespace hdna
