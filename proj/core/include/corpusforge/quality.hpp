#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "corpusforge/kv_config.hpp"
#include "corpusforge/markdown.hpp"

namespace corpusforge {

struct FilterMetrics {
  std::uint64_t char_count = 0;
  double ja_char_ratio = 0.0;
  double mean_line_length = 0.0;      // chars per non-empty line
  double duplicate_line_ratio = 0.0;  // non-empty lines repeating an earlier line
  std::uint64_t max_char_run = 0;     // longest run of one repeated character
  std::uint64_t ngword_hits = 0;
};

struct FilterConfig {
  std::uint64_t min_chars = 400;
  std::uint64_t max_chars = 200000;
  double min_ja_ratio = 0.5;
  double min_mean_line_length = 10.0;
  double max_duplicate_line_ratio = 0.30;
  std::uint64_t max_char_run = 50;
  std::vector<std::string> ngwords;

  /// Reads bare keys (min_chars=..., ngword_file=...) from a kv map.
  /// Unknown keys are rejected by the caller via KvConfig.
  static FilterConfig from_kv(const KvConfig& kv, const std::string& prefix,
                              const std::filesystem::path& base_dir);
};

struct FilterVerdict {
  bool passed = false;
  std::vector<std::string> failed_rules;  // fixed rule order, min_chars first
  FilterMetrics metrics;
};

FilterMetrics compute_metrics(const Document& doc, const std::vector<std::string>& ngwords);

FilterVerdict evaluate_document(const FilterMetrics& metrics, const FilterConfig& config);

/// Loads a standalone filter config file; unknown keys raise ConfigError.
FilterConfig load_filter_config(const std::filesystem::path& path);

/// One NG word per line, UTF-8; blank lines ignored.
std::vector<std::string> load_ngword_file(const std::filesystem::path& path);

}  // namespace corpusforge
