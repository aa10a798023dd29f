#include "perm/cache.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <vector>

#include "perm/errors.hpp"

namespace perm::judges {

namespace {

std::string base64_encode(std::string_view data) {
  if (data.empty()) return "";
  std::string out;
  out.resize(4 * ((data.size() + 2) / 3));
  int written = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(data.data()),
                                static_cast<int>(data.size()));
  out.resize(static_cast<std::size_t>(written));
  return out;
}

std::string base64_decode(std::string_view data) {
  if (data.empty()) return "";
  std::vector<unsigned char> buffer(3 * (data.size() / 4) + 3);
  int written = EVP_DecodeBlock(buffer.data(),
                                reinterpret_cast<const unsigned char*>(data.data()),
                                static_cast<int>(data.size()));
  if (written < 0) {
    throw Error(ErrorCode::StorageError, "cache record holds invalid base64");
  }
  // EVP_DecodeBlock counts '=' padding as zero bytes
  std::size_t padding = 0;
  while (padding < 2 && padding < data.size() && data[data.size() - 1 - padding] == '=') ++padding;
  return std::string(reinterpret_cast<char*>(buffer.data()),
                     static_cast<std::size_t>(written) - padding);
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::StorageError, "sha256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

JudgeCache::JudgeCache(std::string path) : path_(std::move(path)) {
  if (path_.empty()) return;
  std::ifstream in(path_);
  if (!in.is_open()) return;  // a missing file is an empty cache
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto space = line.find(' ');
    if (space == std::string::npos) {
      throw Error(ErrorCode::StorageError,
                  "cache file " + path_ + " line " + std::to_string(line_no) + " is malformed");
    }
    entries_[line.substr(0, space)] = base64_decode(std::string_view(line).substr(space + 1));
  }
}

std::optional<std::string> JudgeCache::get(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void JudgeCache::put(const std::string& key, const std::string& text) {
  std::lock_guard lock(mutex_);
  entries_[key] = text;
  if (path_.empty()) return;
  std::ofstream out(path_, std::ios::app);
  if (!out.is_open()) {
    throw Error(ErrorCode::StorageError, "cache file " + path_ + " is not writable");
  }
  out << key << ' ' << base64_encode(text) << '\n';
  if (!out) {
    throw Error(ErrorCode::StorageError, "write to cache file " + path_ + " failed");
  }
}

std::size_t JudgeCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

}  // namespace perm::judges
