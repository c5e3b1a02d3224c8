#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hdna/dna.hpp"

namespace hdna {

struct BaselineRecord {
  std::string url;
  Fingerprint fingerprint;  // entries are rebuilt from canonical on load
  std::vector<std::pair<std::size_t, double>> weights;
  double total_weight = 0.0;
  std::string created_at;
  std::string preprocess_version;

  bool operator==(const BaselineRecord&) const = default;
};

BaselineRecord make_baseline(const std::string& url, const Fingerprint& fp,
                             std::span<const WeightedNode> nodes, std::string created_at);

// Diff input rebuilt from a stored record. Depth is not persisted and is
// left at 0; diff() does not read it.
std::vector<WeightedNode> weighted_nodes(const BaselineRecord& record);

// One JSON file per URL, named by the SHA-256 of the URL.
class BaselineStore {
 public:
  explicit BaselineStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::filesystem::path path_for(const std::string& url) const;

  // Atomic replace: temp file, fsync, rename. Throws Error(kIo).
  void save(const BaselineRecord& record) const;

  // Throws Error(kIo) or Error(kCorruptBaseline).
  std::optional<BaselineRecord> load(const std::string& url) const;

  // Runs after the temp file is synced and before the rename. Tests use it
  // to simulate a crash at that point.
  std::function<void(const std::filesystem::path& temp)> before_rename;

 private:
  std::filesystem::path dir_;
};

inline void save(const std::filesystem::path& store, const BaselineRecord& record) {
  BaselineStore(store).save(record);
}

inline std::optional<BaselineRecord> load(const std::filesystem::path& store,
                                          const std::string& url) {
  return BaselineStore(store).load(url);
}

}  // namespace hdna
