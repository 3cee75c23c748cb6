#include "corpusforge/gzip.hpp"

#include <zlib.h>

#include <array>
#include <cstring>

#include "corpusforge/errors.hpp"

namespace corpusforge {

struct GzipMemberReader::Impl {
  std::istream* in;
  z_stream z{};
  std::string pending;  // sniffed bytes served before the stream proper
  std::array<char, 1 << 16> inbuf;
  std::uint64_t consumed = 0;  // compressed bytes zlib has consumed so far
  bool eof = false;

  Impl(std::istream& stream, std::string prefix) : in(&stream), pending(std::move(prefix)) {
    z.zalloc = nullptr;
    z.zfree = nullptr;
    z.opaque = nullptr;
    z.avail_in = 0;
    z.next_in = nullptr;
    // 15 + 32: zlib or gzip wrapper, auto-detected.
    if (inflateInit2(&z, 15 + 32) != Z_OK) throw IoError("inflateInit2 failed");
  }
  ~Impl() { inflateEnd(&z); }

  bool fill() {
    if (z.avail_in > 0) return true;
    if (!pending.empty()) {
      std::size_t n = std::min(pending.size(), inbuf.size());
      std::memcpy(inbuf.data(), pending.data(), n);
      pending.erase(0, n);
      z.next_in = reinterpret_cast<Bytef*>(inbuf.data());
      z.avail_in = static_cast<uInt>(n);
      return true;
    }
    if (!*in) return false;
    in->read(inbuf.data(), static_cast<std::streamsize>(inbuf.size()));
    auto got = in->gcount();
    if (got <= 0) return false;
    z.next_in = reinterpret_cast<Bytef*>(inbuf.data());
    z.avail_in = static_cast<uInt>(got);
    return true;
  }
};

GzipMemberReader::GzipMemberReader(std::istream& in, std::string prefix)
    : impl_(std::make_unique<Impl>(in, std::move(prefix))) {}
GzipMemberReader::~GzipMemberReader() = default;

bool GzipMemberReader::next_member(std::string& out) {
  out.clear();
  auto& im = *impl_;
  if (im.eof) return false;

  member_offset_ = im.consumed;
  bool started = false;
  constexpr std::size_t kGrow = 1 << 16;
  while (true) {
    if (!im.fill()) {
      if (!started) {
        im.eof = true;
        return false;
      }
      throw IoError("gzip stream truncated mid-member");
    }
    started = true;
    std::size_t base = out.size();
    out.resize(base + kGrow);
    im.z.next_out = reinterpret_cast<Bytef*>(out.data() + base);
    im.z.avail_out = kGrow;
    uInt before = im.z.avail_in;
    int ret = inflate(&im.z, Z_NO_FLUSH);
    im.consumed += before - im.z.avail_in;
    out.resize(base + (kGrow - im.z.avail_out));
    if (ret == Z_STREAM_END) {
      if (inflateReset(&im.z) != Z_OK) throw IoError("inflateReset failed");
      return true;
    }
    if (ret == Z_OK) continue;
    if (ret == Z_BUF_ERROR && im.z.avail_in == 0) continue;  // need more input
    throw IoError("gzip inflate error " + std::to_string(ret));
  }
}

std::string gzip_compress(std::string_view data, int level) {
  z_stream z{};
  // 15 + 16 selects the gzip wrapper. zlib writes a fixed header (mtime 0),
  // which keeps repeated compressions of the same bytes identical.
  if (deflateInit2(&z, level, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw IoError("deflateInit2 failed");
  }
  std::string out;
  out.resize(deflateBound(&z, static_cast<uLong>(data.size())));
  z.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  z.avail_in = static_cast<uInt>(data.size());
  z.next_out = reinterpret_cast<Bytef*>(out.data());
  z.avail_out = static_cast<uInt>(out.size());
  int ret = deflate(&z, Z_FINISH);
  if (ret != Z_STREAM_END) {
    deflateEnd(&z);
    throw IoError("deflate error " + std::to_string(ret));
  }
  out.resize(out.size() - z.avail_out);
  deflateEnd(&z);
  return out;
}

std::string gzip_decompress(std::string_view data) {
  std::string out;
  z_stream z{};
  if (inflateInit2(&z, 15 + 32) != Z_OK) throw IoError("inflateInit2 failed");
  z.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  z.avail_in = static_cast<uInt>(data.size());
  constexpr std::size_t kGrow = 1 << 16;
  while (true) {
    std::size_t base = out.size();
    out.resize(base + kGrow);
    z.next_out = reinterpret_cast<Bytef*>(out.data() + base);
    z.avail_out = kGrow;
    int ret = inflate(&z, Z_NO_FLUSH);
    out.resize(base + (kGrow - z.avail_out));
    if (ret == Z_STREAM_END) {
      if (z.avail_in == 0) break;
      if (inflateReset(&z) != Z_OK) {
        inflateEnd(&z);
        throw IoError("inflateReset failed");
      }
      continue;
    }
    if (ret == Z_OK) continue;
    inflateEnd(&z);
    throw IoError(z.avail_in == 0 ? "gzip stream truncated" : "gzip inflate error " + std::to_string(ret));
  }
  inflateEnd(&z);
  return out;
}

bool looks_like_gzip(std::string_view head) {
  return head.size() >= 2 && static_cast<unsigned char>(head[0]) == 0x1F &&
         static_cast<unsigned char>(head[1]) == 0x8B;
}

}  // namespace corpusforge
