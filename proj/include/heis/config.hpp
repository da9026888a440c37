#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace heis {

// Flat key=value configuration; '#' starts a comment.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value) { kv_[key] = value; }
  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  std::string get(const std::string& key, const std::string& def) const;
  double get_double(const std::string& key, double def) const;
  long get_int(const std::string& key, long def) const;

  // Sorted "key=value\n" lines; the hash is FNV-1a 64 of this text.
  std::string canonical() const;
  std::uint64_t hash() const;
  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

std::uint64_t fnv1a64(const std::string& s);

}  // namespace heis
