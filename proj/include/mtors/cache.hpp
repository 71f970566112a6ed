#pragma once

#include <filesystem>
#include <optional>
#include <string>

namespace mtors {

std::string sha256_hex(const std::string& data);

// Keyed text artifacts, e.g. "gamma1_11/op_T3".
class ArtifactCache {
 public:
  virtual ~ArtifactCache() = default;
  virtual std::optional<std::string> get(const std::string& key) = 0;
  virtual void put(const std::string& key, const std::string& payload) = 0;
};

// One file per key under a root directory.  The first line of each file is
// "sha256 <hex digest of the payload>"; reads verify it and throw CacheCorrupt
// on mismatch.  Writes go to a temporary file that is renamed into place.
class FileCache : public ArtifactCache {
 public:
  explicit FileCache(std::filesystem::path root);

  // --cache flag, else $MTORS_CACHE, else ./.mtors-cache
  static std::filesystem::path resolve_root(const std::string& flag);

  const std::filesystem::path& root() const { return root_; }
  std::optional<std::string> get(const std::string& key) override;
  void put(const std::string& key, const std::string& payload) override;

 private:
  std::filesystem::path path_of(const std::string& key) const;
  std::filesystem::path root_;
};

}  // namespace mtors
