#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <string>
#include <string_view>

namespace corpusforge {

/// Reads a stream of concatenated gzip members one member at a time, the
/// layout CommonCrawl uses for WARC files (one record per member).
class GzipMemberReader {
 public:
  /// prefix holds bytes already pulled off the stream (e.g. by format
  /// sniffing); they are consumed before anything else is read.
  explicit GzipMemberReader(std::istream& in, std::string prefix = {});
  ~GzipMemberReader();
  GzipMemberReader(const GzipMemberReader&) = delete;
  GzipMemberReader& operator=(const GzipMemberReader&) = delete;

  /// Decompresses the next member into out. Returns false at clean EOF.
  /// Throws IoError on a corrupt or truncated stream.
  bool next_member(std::string& out);

  /// Compressed byte offset where the most recent member started.
  std::uint64_t member_offset() const { return member_offset_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::uint64_t member_offset_ = 0;
};

std::string gzip_compress(std::string_view data, int level = 6);

/// Inflates all members of a gzip stream into one buffer.
std::string gzip_decompress(std::string_view data);

bool looks_like_gzip(std::string_view head);

}  // namespace corpusforge
