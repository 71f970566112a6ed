#include "mtors/cache.hpp"

#include "mtors/core.hpp"

#include <openssl/evp.h>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace mtors {

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

FileCache::FileCache(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path FileCache::resolve_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("MTORS_CACHE"); env && *env) return env;
  return ".mtors-cache";
}

std::filesystem::path FileCache::path_of(const std::string& key) const {
  if (key.empty() || key.find("..") != std::string::npos || key.front() == '/')
    throw Error(ErrorKind::Parse, "bad cache key '" + key + "'");
  return root_ / key;
}

std::optional<std::string> FileCache::get(const std::string& key) {
  const auto path = path_of(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::string header;
  std::getline(in, header);
  std::ostringstream body;
  body << in.rdbuf();
  std::string payload = body.str();
  if (header.rfind("sha256 ", 0) != 0 || header.substr(7) != sha256_hex(payload))
    throw Error(ErrorKind::CacheCorrupt, "hash mismatch in " + path.string());
  return payload;
}

void FileCache::put(const std::string& key, const std::string& payload) {
  static std::atomic<unsigned long> counter{0};
  const auto path = path_of(key);
  std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << "sha256 " << sha256_hex(payload) << '\n' << payload;
    out.flush();
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace mtors
