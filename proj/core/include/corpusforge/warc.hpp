#pragma once

#include <chrono>
#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corpusforge/doc_id.hpp"

namespace corpusforge {

enum class WarcRecordType { warcinfo, request, response, metadata, resource, other };

std::string_view to_string(WarcRecordType t);

struct WarcRecord {
  WarcRecordType type = WarcRecordType::other;
  std::string target_uri;
  std::chrono::sys_seconds date{};
  std::string record_id;
  std::uint64_t content_length = 0;
  std::string payload;  // full block, HTTP headers included for responses
  std::optional<int> http_status;
  std::optional<std::string> http_content_type;
};

struct WarcHeader {
  WarcRecordType type = WarcRecordType::other;
  std::string target_uri;
  std::chrono::sys_seconds date{};
  std::string record_id;
  std::uint64_t content_length = 0;
};

/// Parses the header block of one record (the text up to the first blank
/// line). Field names match case-insensitively; unknown fields are ignored;
/// unrecognized WARC-Type values map to `other`. Throws MalformedHeader when
/// the WARC/1.x version line or Content-Length is missing.
WarcHeader parse_record_header(std::string_view header_block);

struct WarcReadStats {
  std::uint64_t members = 0;  // record slots seen (gzip members or plain attempts)
  std::uint64_t yielded = 0;
  std::uint64_t truncated = 0;
  std::uint64_t malformed = 0;
  std::uint64_t stream_errors = 0;  // corrupt compression mid-file; rest of file skipped
};

/// Streams WARC records from either a member-per-record gzip stream (the
/// CommonCrawl layout) or an uncompressed WARC stream. Records with
/// unparseable headers or truncated payloads are skipped and counted, never
/// partially yielded. Throws UnreadableArchive when the stream is neither
/// gzip nor WARC.
class WarcReader {
 public:
  explicit WarcReader(std::istream& in);
  ~WarcReader();
  WarcReader(const WarcReader&) = delete;
  WarcReader& operator=(const WarcReader&) = delete;

  std::optional<WarcRecord> next();

  const WarcReadStats& stats() const;

  /// Byte offset where the current record started: the compressed offset of
  /// its gzip member, or the plain-stream offset. Stable across passes, so a
  /// resume can seek back to it.
  std::uint64_t record_offset() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

enum class ContentKind { html, plain };

std::string_view to_string(ContentKind k);
std::optional<ContentKind> content_kind_from_string(std::string_view s);

struct RawDocument {
  DocId id;
  std::string url;
  std::chrono::sys_seconds fetch_time{};
  ContentKind kind = ContentKind::html;
  std::string charset;
  std::string text;  // decoded body, HTTP headers stripped
};

struct DecodedText {
  std::string text;
  std::string charset;
  bool lossy = false;  // replacement-character fallback was used
};

/// Decodes payload bytes to UTF-8: declared charset first, then UTF-8, then
/// the fallback list; the first strict decode wins. When everything fails the
/// text is decoded as UTF-8 with replacement characters and flagged lossy.
DecodedText decode_charset(std::string_view payload, const std::optional<std::string>& declared,
                           const std::vector<std::string>& fallbacks);

/// Default fallback charsets: the dominant legacy Japanese encodings.
const std::vector<std::string>& default_charset_fallbacks();

enum class ExtractDrop { kept, non_response, non_200, non_text, decode_failure };

std::string_view to_string(ExtractDrop d);

/// Builds a RawDocument from a response record with HTTP status 200 and a
/// text/html or text/plain content type. Non-qualifying records return
/// nullopt with the drop reason.
std::optional<RawDocument> extract_response_document(const WarcRecord& record, const DocId& id,
                                                     const std::vector<std::string>& charset_fallbacks,
                                                     ExtractDrop& reason);

struct LangScore {
  double score = 0.0;  // Japanese-script letters / all letters
  std::uint64_t letter_count = 0;
};

/// Fraction of Japanese-script letters (hiragana, katakana, CJK unified
/// ideographs) among Unicode letter characters. Zero letters scores 0.
LangScore score_japanese(std::string_view text);

// RFC 3339 / WARC-Date helpers ("YYYY-MM-DDTHH:MM:SSZ").
std::string format_rfc3339(std::chrono::sys_seconds t);
std::optional<std::chrono::sys_seconds> parse_rfc3339(std::string_view s);

}  // namespace corpusforge
