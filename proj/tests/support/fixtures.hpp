#pragma once

// Shared fixture machinery for unit and acceptance tests: synthetic WARC
// archives, Japanese text generation, and constructed-Jaccard shingle pairs.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <unordered_set>
#include <vector>

#include "corpusforge/gzip.hpp"
#include "corpusforge/hashing.hpp"
#include "corpusforge/minhash.hpp"
#include "corpusforge/unicode.hpp"

namespace testsupport {

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    const char* env = std::getenv("CORPUSFORGE_TMPDIR");
    std::filesystem::path base = env && *env ? std::filesystem::path(env)
                                             : std::filesystem::temp_directory_path();
    std::filesystem::create_directories(base);
    static std::atomic<std::uint64_t> counter{0};
    auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = base / ("corpusforge-" + tag + "-" + std::to_string(stamp) + "-" +
                    std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// --- WARC construction ----------------------------------------------------

struct WarcRecordSpec {
  std::string type = "response";
  std::string uri = "http://example.jp/";
  std::string date = "2017-03-22T09:00:00Z";
  std::string record_id = "<urn:uuid:0001>";
  std::string block;  // full record block (HTTP message for responses)
};

inline std::string warc_record_bytes(const WarcRecordSpec& spec) {
  std::string header = "WARC/1.0\r\n";
  header += "WARC-Type: " + spec.type + "\r\n";
  if (!spec.uri.empty()) header += "WARC-Target-URI: " + spec.uri + "\r\n";
  header += "WARC-Date: " + spec.date + "\r\n";
  header += "WARC-Record-ID: " + spec.record_id + "\r\n";
  header += "Content-Length: " + std::to_string(spec.block.size()) + "\r\n";
  header += "\r\n";
  return header + spec.block + "\r\n\r\n";
}

inline std::string http_response_block(const std::string& body,
                                       const std::string& content_type = "text/html; charset=utf-8",
                                       int status = 200) {
  std::string reason = status == 200 ? "OK" : "NA";
  std::string head = "HTTP/1.1 " + std::to_string(status) + " " + reason + "\r\n";
  head += "Content-Type: " + content_type + "\r\n";
  head += "Content-Length: " + std::to_string(body.size()) + "\r\n";
  head += "\r\n";
  return head + body;
}

inline std::string response_record(const std::string& body, const std::string& uri,
                                   const std::string& content_type = "text/html; charset=utf-8",
                                   int status = 200) {
  WarcRecordSpec spec;
  spec.uri = uri;
  spec.block = http_response_block(body, content_type, status);
  return warc_record_bytes(spec);
}

/// Member-per-record gzip archive, the CommonCrawl layout.
inline std::string gzip_archive(const std::vector<std::string>& records) {
  std::string out;
  for (const auto& rec : records) out += corpusforge::gzip_compress(rec);
  return out;
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

// --- Japanese text generation ----------------------------------------------

/// Deterministic pseudo-Japanese prose: hiragana/katakana/kanji with
/// punctuation, high Japanese letter ratio, no long character runs.
class JapaneseTextGen {
 public:
  explicit JapaneseTextGen(std::uint64_t seed) : rng_(seed) {}

  std::string sentence(std::size_t chars) {
    static const char32_t kHiragana[] = U"あいうえおかきくけこさしすせそたちつてとなにぬねのはひふへほまみむめもやゆよらりるれわをん";
    static const char32_t kKatakana[] = U"アイウエオカキクケコサシスセソタチツテトナニヌネノハヒフヘホマミムメモヤユヨラリルレロワ";
    static const char32_t kKanji[] = U"日本語学校生活時間人事思考文化発展研究開発平和社会経済科学技術自然環境教育情報";
    std::string out;
    for (std::size_t i = 0; i < chars; ++i) {
      std::uint64_t pick = rng_.below(100);
      char32_t cp;
      if (pick < 55) {
        cp = kHiragana[rng_.below(std::size(kHiragana) - 1)];
      } else if (pick < 75) {
        cp = kKatakana[rng_.below(std::size(kKatakana) - 1)];
      } else {
        cp = kKanji[rng_.below(std::size(kKanji) - 1)];
      }
      corpusforge::append_utf8(cp, out);
    }
    out += "。";  // 。
    return out;
  }

  /// Multi-paragraph document body that passes the default quality filter.
  std::string document(std::size_t paragraphs = 6, std::size_t sentence_chars = 40) {
    std::string out;
    for (std::size_t p = 0; p < paragraphs; ++p) {
      for (int s = 0; s < 2; ++s) out += sentence(sentence_chars + rng_.below(20));
      if (p + 1 < paragraphs) out += "\n";
    }
    return out;
  }

  corpusforge::SplitMix64& rng() { return rng_; }

 private:
  corpusforge::SplitMix64 rng_;
};

/// Wraps body text in enough HTML structure to exercise the converter.
inline std::string html_page(const std::string& title, const std::vector<std::string>& paragraphs) {
  std::string out = "<html><head><script>var x=1;</script></head><body>";
  out += "<nav>menu menu</nav>";
  out += "<h1>" + title + "</h1>";
  for (const auto& p : paragraphs) out += "<p>" + p + "</p>";
  out += "<footer>footer text</footer></body></html>";
  return out;
}

// --- synthetic WARC corpus ----------------------------------------------------

struct CorpusSpec {
  std::vector<std::string> dumps = {"2017-04", "2019-35", "2023-50"};
  int files_per_dump = 1;
  int ja_docs_per_file = 20;   // unique quality-passing Japanese pages
  int noise_records_per_file = 6;
  int exact_dup_groups = 3;    // identical bodies planted across dumps
  int near_dup_pairs = 0;      // mutated cross-dump copies (J around 0.95)
  bool truncated_member_per_file = true;
  std::uint64_t seed = 1;
};

struct CorpusInfo {
  std::uint64_t total_records = 0;
  std::uint64_t exact_dup_extras = 0;  // guaranteed-removable duplicate copies
  std::uint64_t near_dup_extras = 0;
};

/// Writes <input_dir>/<dump>/file-<i>.warc.gz archives. Every file carries
/// unique Japanese pages plus noise (requests, 404s, images, English pages,
/// short pages, chrome-only pages, undecodable bytes, legacy charsets) and,
/// across dumps, planted duplicate bodies.
inline CorpusInfo build_corpus(const std::filesystem::path& input_dir, const CorpusSpec& spec) {
  CorpusInfo info;
  corpusforge::SplitMix64 rng(spec.seed);
  JapaneseTextGen gen(spec.seed ^ 0x5eedULL);

  auto split_paragraphs = [](const std::string& body_text) {
    std::vector<std::string> paragraphs;
    std::size_t pos = 0;
    while (pos < body_text.size()) {
      auto nl = body_text.find('\n', pos);
      paragraphs.push_back(body_text.substr(pos, nl == std::string::npos ? nl : nl - pos));
      if (nl == std::string::npos) break;
      pos = nl + 1;
    }
    return paragraphs;
  };
  auto page_of = [&](const std::string& body_text) {
    return html_page(gen.sentence(8), split_paragraphs(body_text));
  };

  // Planted duplicates: exact copies are full pages reused verbatim; near
  // duplicates share a fixed title and mutate a few body characters.
  std::vector<std::string> dup_pages;
  for (int g = 0; g < spec.exact_dup_groups; ++g) dup_pages.push_back(page_of(gen.document(6, 45)));
  std::vector<std::string> near_bases;
  std::vector<std::string> near_titles;
  for (int g = 0; g < spec.near_dup_pairs; ++g) {
    near_bases.push_back(gen.document(6, 45));
    near_titles.push_back(gen.sentence(8));
  }

  auto mutate = [&](std::string text, int edits) {
    auto cps = corpusforge::decode_utf8(text);
    for (int e = 0; e < edits; ++e) {
      std::size_t at = rng.below(cps.size());
      cps[at] = U'変';
    }
    return corpusforge::encode_utf8(cps);
  };

  int url_counter = 0;
  for (std::size_t d = 0; d < spec.dumps.size(); ++d) {
    const std::string& dump = spec.dumps[d];
    for (int f = 0; f < spec.files_per_dump; ++f) {
      std::vector<std::string> records;
      auto url = [&]() { return "http://site" + std::to_string(url_counter++) + ".example.jp/"; };

      for (int i = 0; i < spec.ja_docs_per_file; ++i) {
        records.push_back(response_record(page_of(gen.document(6, 45)), url()));
      }
      // Planted duplicates: same page bytes in every dump (first file only).
      if (f == 0) {
        for (const auto& page : dup_pages) {
          records.push_back(response_record(page, url()));
          if (d > 0) ++info.exact_dup_extras;
        }
        for (std::size_t g = 0; g < near_bases.size(); ++g) {
          std::string body = d == 0 ? near_bases[g] : mutate(near_bases[g], 3);
          records.push_back(
              response_record(html_page(near_titles[g], split_paragraphs(body)), url()));
          if (d > 0) ++info.near_dup_extras;
        }
      }

      // Noise records exercising every drop reason.
      for (int i = 0; i < spec.noise_records_per_file; ++i) {
        switch (i % 6) {
          case 0: {
            WarcRecordSpec req;
            req.type = "request";
            req.uri = url();
            req.block = "GET / HTTP/1.1\r\nHost: x\r\n\r\n";
            records.push_back(warc_record_bytes(req));
            break;
          }
          case 1:
            records.push_back(response_record(page_of(gen.document(3, 40)), url(),
                                              "text/html; charset=utf-8", 404));
            break;
          case 2:
            records.push_back(response_record("\x89PNG\r\n\x1a\n", url(), "image/png"));
            break;
          case 3:
            records.push_back(response_record(
                "<p>plain english page with no japanese content at all, repeated words</p>",
                url()));
            break;
          case 4:
            // Japanese but far too short: passes ingest, fails min_chars.
            records.push_back(response_record("<p>" + gen.sentence(20) + "</p>", url()));
            break;
          default:
            // Japanese chrome only: converts to nothing.
            records.push_back(
                response_record("<nav>" + gen.sentence(30) + "</nav>", url()));
            break;
        }
      }
      // One page in Shift_JIS exercising the charset path.
      {
        std::string page = page_of(gen.document(5, 50));
        auto encoded = corpusforge::try_encode(page, "shift_jis");
        records.push_back(
            response_record(encoded ? *encoded : page, url(), "text/html; charset=shift_jis"));
      }
      // Undecodable bytes: decode-failure.
      records.push_back(response_record("\xff\xfe\xff\xff", url(), "text/plain"));

      info.total_records += records.size();
      std::string archive = gzip_archive(records);
      if (spec.truncated_member_per_file) {
        std::string cut = response_record(page_of(gen.document(4, 40)), url());
        archive += corpusforge::gzip_compress(cut.substr(0, cut.size() / 2));
        ++info.total_records;
      }
      char name[32];
      std::snprintf(name, sizeof(name), "file-%02d.warc.gz", f);
      write_file(input_dir / dump / name, archive);
    }
  }
  return info;
}

// --- constructed-Jaccard pairs ----------------------------------------------

/// Two shingle sets with exact Jaccard J: |A|=|B|=100(1+J) sharing 200J
/// elements, so |A∪B| = 200 and |A∩B| = 200J. J must be a multiple of 0.005.
inline std::pair<corpusforge::ShingleSet, corpusforge::ShingleSet> jaccard_pair(
    double jaccard, corpusforge::SplitMix64& rng) {
  const std::size_t shared = static_cast<std::size_t>(200.0 * jaccard + 0.5);
  const std::size_t size = 100 + shared / 2 + (shared % 2);  // 100(1+J) for even 200J
  std::unordered_set<std::uint64_t> seen;
  auto fresh = [&]() {
    while (true) {
      std::uint64_t v = rng.next();
      if (seen.insert(v).second) return v;
    }
  };
  std::vector<std::uint64_t> common(shared);
  for (auto& v : common) v = fresh();
  corpusforge::ShingleSet a, b;
  a.hashes = common;
  b.hashes = common;
  while (a.hashes.size() < size) a.hashes.push_back(fresh());
  while (b.hashes.size() < size) b.hashes.push_back(fresh());
  std::sort(a.hashes.begin(), a.hashes.end());
  std::sort(b.hashes.begin(), b.hashes.end());
  return {std::move(a), std::move(b)};
}

}  // namespace testsupport
