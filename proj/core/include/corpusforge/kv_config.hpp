#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace corpusforge {

/// Flat key=value configuration. Lines are `key = value`; '#' starts a
/// comment; blank lines are ignored; keys may be dotted (e.g. "dedup.k").
class KvConfig {
 public:
  static KvConfig parse(std::string_view text);
  static KvConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;

  /// Inserts or overwrites a key (CLI flag overrides).
  void set(const std::string& key, std::string value);

  // Typed getters; throw ConfigError on malformed values.
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key,
                                    const std::vector<std::string>& fallback) const;

  /// Keys sharing a dotted prefix, e.g. keys_with_prefix("mix.target.")
  /// returns the suffixes after the prefix.
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

  /// Marks a key as consumed; unconsumed keys are rejected by
  /// reject_unknown_keys so typos fail loudly.
  void mark_used(const std::string& key) const;
  void reject_unknown_keys() const;

  /// Sorted "key=value" lines; the basis of the config hash.
  std::string canonical_text() const;

 private:
  std::map<std::string, std::string> entries_;
  mutable std::map<std::string, bool> used_;
};

}  // namespace corpusforge
