#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace perm::judges {

std::string sha256_hex(std::string_view data);

/// Key->text store for judge responses. With a path it persists as
/// line-delimited "<hex digest> <base64 text>" records, replayed at open
/// with last-writer-wins; with an empty path it is memory-only. Safe under
/// concurrent get/put.
class JudgeCache {
 public:
  JudgeCache() = default;
  explicit JudgeCache(std::string path);

  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, const std::string& text);

  std::size_t size() const;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  mutable std::mutex mutex_;
  std::map<std::string, std::string> entries_;
};

}  // namespace perm::judges
