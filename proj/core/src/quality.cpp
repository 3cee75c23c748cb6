#include "corpusforge/quality.hpp"

#include <fstream>
#include <unordered_set>

#include "corpusforge/errors.hpp"
#include "corpusforge/unicode.hpp"
#include "corpusforge/warc.hpp"

namespace corpusforge {

FilterMetrics compute_metrics(const Document& doc, const std::vector<std::string>& ngwords) {
  FilterMetrics m;
  const std::string& text = doc.markdown;
  m.char_count = count_scalars(text);

  LangScore lang = score_japanese(text);
  m.ja_char_ratio = lang.score;

  // Line statistics over non-empty lines.
  std::uint64_t nonempty = 0;
  std::uint64_t total_line_chars = 0;
  std::uint64_t repeats = 0;
  std::unordered_set<std::string_view> seen;
  std::size_t pos = 0;
  while (pos <= text.size() && !text.empty()) {
    auto nl = text.find('\n', pos);
    std::string_view line = std::string_view(text).substr(
        pos, nl == std::string::npos ? text.size() - pos : nl - pos);
    if (!line.empty()) {
      ++nonempty;
      total_line_chars += count_scalars(line);
      if (!seen.insert(line).second) ++repeats;
    }
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  m.mean_line_length = nonempty == 0 ? 0.0 : double(total_line_chars) / double(nonempty);
  m.duplicate_line_ratio = nonempty == 0 ? 0.0 : double(repeats) / double(nonempty);

  // Longest run of one repeated scalar value.
  std::u32string cps = decode_utf8(text);
  std::uint64_t run = 0;
  char32_t prev = 0;
  for (char32_t cp : cps) {
    run = (run > 0 && cp == prev) ? run + 1 : 1;
    prev = cp;
    m.max_char_run = std::max(m.max_char_run, run);
  }

  // Substring NG-word hits; matches within a word advance past the match.
  for (const auto& word : ngwords) {
    if (word.empty()) continue;
    std::size_t at = 0;
    while ((at = text.find(word, at)) != std::string::npos) {
      ++m.ngword_hits;
      at += word.size();
    }
  }
  return m;
}

FilterVerdict evaluate_document(const FilterMetrics& metrics, const FilterConfig& config) {
  FilterVerdict v;
  v.metrics = metrics;
  if (metrics.char_count < config.min_chars) v.failed_rules.push_back("min_chars");
  if (metrics.char_count > config.max_chars) v.failed_rules.push_back("max_chars");
  if (metrics.ja_char_ratio < config.min_ja_ratio) v.failed_rules.push_back("min_ja_ratio");
  if (metrics.mean_line_length < config.min_mean_line_length) {
    v.failed_rules.push_back("min_mean_line_length");
  }
  if (metrics.duplicate_line_ratio > config.max_duplicate_line_ratio) {
    v.failed_rules.push_back("max_duplicate_line_ratio");
  }
  if (metrics.max_char_run > config.max_char_run) v.failed_rules.push_back("max_char_run");
  if (metrics.ngword_hits > 0) v.failed_rules.push_back("ngword");
  v.passed = v.failed_rules.empty();
  return v;
}

std::vector<std::string> load_ngword_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open NG-word file");
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (!line.empty()) words.push_back(line);
  }
  return words;
}

FilterConfig FilterConfig::from_kv(const KvConfig& kv, const std::string& prefix,
                                   const std::filesystem::path& base_dir) {
  FilterConfig c;
  c.min_chars = kv.get_uint(prefix + "min_chars", c.min_chars);
  c.max_chars = kv.get_uint(prefix + "max_chars", c.max_chars);
  c.min_ja_ratio = kv.get_double(prefix + "min_ja_ratio", c.min_ja_ratio);
  c.min_mean_line_length = kv.get_double(prefix + "min_mean_line_length", c.min_mean_line_length);
  c.max_duplicate_line_ratio =
      kv.get_double(prefix + "max_duplicate_line_ratio", c.max_duplicate_line_ratio);
  c.max_char_run = kv.get_uint(prefix + "max_char_run", c.max_char_run);
  if (c.min_chars > c.max_chars) {
    throw ConfigError(prefix + "min_chars", "min_chars exceeds max_chars");
  }
  if (c.min_ja_ratio < 0.0 || c.min_ja_ratio > 1.0) {
    throw ConfigError(prefix + "min_ja_ratio", "must be in [0,1]");
  }
  if (c.max_duplicate_line_ratio < 0.0 || c.max_duplicate_line_ratio > 1.0) {
    throw ConfigError(prefix + "max_duplicate_line_ratio", "must be in [0,1]");
  }
  if (auto ng = kv.get(prefix + "ngword_file")) {
    std::filesystem::path p = *ng;
    if (p.is_relative()) p = base_dir / p;
    c.ngwords = load_ngword_file(p);
  }
  return c;
}

FilterConfig load_filter_config(const std::filesystem::path& path) {
  KvConfig kv = KvConfig::load(path);
  FilterConfig c = FilterConfig::from_kv(kv, "", path.parent_path());
  kv.reject_unknown_keys();
  return c;
}

}  // namespace corpusforge
