#include "corpusforge/warc.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>

#include "corpusforge/errors.hpp"
#include "corpusforge/gzip.hpp"
#include "corpusforge/unicode.hpp"

namespace corpusforge {

namespace {

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Days since 1970-01-01 for a proleptic Gregorian date (Howard Hinnant's
// civil-days algorithm).
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = static_cast<int>(yr + (m <= 2));
}

}  // namespace

std::string format_rfc3339(std::chrono::sys_seconds t) {
  std::int64_t secs = t.time_since_epoch().count();
  std::int64_t days = secs >= 0 ? secs / 86400 : (secs - 86399) / 86400;
  std::int64_t rem = secs - days * 86400;
  int y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", y, m, d,
                static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                static_cast<int>(rem % 60));
  return buf;
}

std::optional<std::chrono::sys_seconds> parse_rfc3339(std::string_view s) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
  char tz = 0;
  if (std::sscanf(std::string(s).c_str(), "%d-%d-%dT%d:%d:%d%c", &y, &mo, &d, &h, &mi, &se, &tz) < 6) {
    return std::nullopt;
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 || se < 0 || se > 60) {
    return std::nullopt;
  }
  std::int64_t secs =
      days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d)) * 86400 + h * 3600 + mi * 60 + se;
  return std::chrono::sys_seconds(std::chrono::seconds(secs));
}

std::string_view to_string(WarcRecordType t) {
  switch (t) {
    case WarcRecordType::warcinfo: return "warcinfo";
    case WarcRecordType::request: return "request";
    case WarcRecordType::response: return "response";
    case WarcRecordType::metadata: return "metadata";
    case WarcRecordType::resource: return "resource";
    case WarcRecordType::other: return "other";
  }
  return "other";
}

namespace {

WarcRecordType record_type_from(std::string_view v) {
  std::string s = ascii_lower(trim(v));
  if (s == "warcinfo") return WarcRecordType::warcinfo;
  if (s == "request") return WarcRecordType::request;
  if (s == "response") return WarcRecordType::response;
  if (s == "metadata") return WarcRecordType::metadata;
  if (s == "resource") return WarcRecordType::resource;
  return WarcRecordType::other;
}

}  // namespace

WarcHeader parse_record_header(std::string_view header_block) {
  WarcHeader out;
  bool saw_version = false;
  bool saw_length = false;

  std::size_t pos = 0;
  bool first = true;
  while (pos < header_block.size()) {
    auto nl = header_block.find('\n', pos);
    std::string_view line = header_block.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? header_block.size() : nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (first) {
      first = false;
      if (!line.starts_with("WARC/1.")) throw MalformedHeader("missing WARC/1.x version line");
      saw_version = true;
      continue;
    }
    if (line.empty()) break;

    // Continuation line (folded header value).
    if (line.front() == ' ' || line.front() == '\t') {
      continue;  // folded values are irrelevant for the fields we keep
    }
    auto colon = line.find(':');
    if (colon == std::string_view::npos) continue;  // tolerate junk lines
    std::string name = ascii_lower(trim(line.substr(0, colon)));
    std::string_view value = trim(line.substr(colon + 1));

    if (name == "warc-type") {
      out.type = record_type_from(value);
    } else if (name == "warc-target-uri") {
      out.target_uri = std::string(value);
    } else if (name == "warc-date") {
      if (auto t = parse_rfc3339(value)) out.date = *t;
    } else if (name == "warc-record-id") {
      out.record_id = std::string(value);
    } else if (name == "content-length") {
      std::uint64_t n = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw MalformedHeader("unparseable Content-Length");
      }
      out.content_length = n;
      saw_length = true;
    }
  }
  if (!saw_version) throw MalformedHeader("missing WARC/1.x version line");
  if (!saw_length) throw MalformedHeader("missing Content-Length");
  return out;
}

namespace {

// Minimal buffered reader so plain (uncompressed) WARC streams can be parsed
// without slurping whole multi-GiB files.
class BufferedReader {
 public:
  BufferedReader(std::istream& in, std::string head) : in_(in), buf_(std::move(head)) {}

  bool read_line(std::string& line) {
    line.clear();
    while (true) {
      auto nl = buf_.find('\n', pos_);
      if (nl != std::string::npos) {
        line.assign(buf_, pos_, nl - pos_);
        pos_ = nl + 1;
        compact();
        return true;
      }
      if (!refill()) {
        if (pos_ < buf_.size()) {
          line.assign(buf_, pos_, buf_.size() - pos_);
          pos_ = buf_.size();
          return true;
        }
        return false;
      }
    }
  }

  // Returns the number of bytes actually read (< n only at EOF).
  std::size_t read_exact(std::string& out, std::size_t n) {
    out.clear();
    while (buf_.size() - pos_ < n && refill()) {
    }
    std::size_t avail = std::min(n, buf_.size() - pos_);
    out.assign(buf_, pos_, avail);
    pos_ += avail;
    compact();
    return avail;
  }

  bool at_eof() {
    return pos_ >= buf_.size() && !refill();
  }

  std::uint64_t offset() const { return consumed_ + pos_; }

 private:
  bool refill() {
    if (!in_) return false;
    char chunk[1 << 16];
    in_.read(chunk, sizeof(chunk));
    auto got = in_.gcount();
    if (got <= 0) return false;
    buf_.append(chunk, static_cast<std::size_t>(got));
    return true;
  }

  void compact() {
    if (pos_ > (1 << 20)) {
      consumed_ += pos_;
      buf_.erase(0, pos_);
      pos_ = 0;
    }
  }

  std::istream& in_;
  std::string buf_;
  std::size_t pos_ = 0;
  std::uint64_t consumed_ = 0;
};

struct HttpResponseView {
  int status = 0;
  std::optional<std::string> content_type;
  std::size_t body_offset = 0;
};

std::optional<HttpResponseView> parse_http_response(std::string_view payload) {
  HttpResponseView out;
  auto line_end = payload.find('\n');
  std::string_view status_line = payload.substr(0, line_end == std::string_view::npos ? payload.size() : line_end);
  if (!status_line.empty() && status_line.back() == '\r') status_line.remove_suffix(1);
  if (!status_line.starts_with("HTTP/")) return std::nullopt;
  auto sp = status_line.find(' ');
  if (sp == std::string_view::npos) return std::nullopt;
  std::string_view rest = trim(status_line.substr(sp + 1));
  int status = 0;
  auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + std::min<std::size_t>(rest.size(), 3), status);
  if (ec != std::errc() || ptr == rest.data()) return std::nullopt;
  out.status = status;

  std::size_t pos = line_end == std::string_view::npos ? payload.size() : line_end + 1;
  while (pos < payload.size()) {
    auto nl = payload.find('\n', pos);
    std::string_view line = payload.substr(pos, nl == std::string_view::npos ? payload.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? payload.size() : nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) break;  // end of headers
    auto colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    if (ascii_lower(trim(line.substr(0, colon))) == "content-type") {
      out.content_type = std::string(trim(line.substr(colon + 1)));
    }
  }
  out.body_offset = pos;
  return out;
}

}  // namespace

struct WarcReader::Impl {
  enum class Mode { empty, gzip, plain };
  Mode mode = Mode::empty;
  std::unique_ptr<GzipMemberReader> gz;
  std::unique_ptr<BufferedReader> plain;
  WarcReadStats stats;
  std::uint64_t record_offset = 0;
  std::string member;  // scratch for gzip mode

  explicit Impl(std::istream& in) {
    std::string head;
    char c;
    while (head.size() < 5 && in.get(c)) head.push_back(c);
    if (head.empty()) {
      mode = Mode::empty;
      return;
    }
    if (looks_like_gzip(head)) {
      mode = Mode::gzip;
      gz = std::make_unique<GzipMemberReader>(in, head);
    } else if (std::string_view(head).starts_with(std::string_view("WARC/").substr(0, head.size()))) {
      mode = Mode::plain;
      plain = std::make_unique<BufferedReader>(in, head);
    } else {
      throw UnreadableArchive("stream is neither gzip nor WARC");
    }
  }

  // Parses the single record carried by one gzip member.
  std::optional<WarcRecord> record_from_member(std::string_view m) {
    auto blank = m.find("\r\n\r\n");
    std::size_t header_len, body_start;
    if (blank != std::string_view::npos) {
      header_len = blank + 2;  // keep the final header line terminator
      body_start = blank + 4;
    } else {
      auto lf = m.find("\n\n");
      if (lf == std::string_view::npos) {
        ++stats.malformed;
        return std::nullopt;
      }
      header_len = lf + 1;
      body_start = lf + 2;
    }
    WarcHeader h;
    try {
      h = parse_record_header(m.substr(0, header_len));
    } catch (const MalformedHeader&) {
      ++stats.malformed;
      return std::nullopt;
    }
    if (m.size() - body_start < h.content_length) {
      ++stats.truncated;
      return std::nullopt;
    }
    return assemble(h, std::string(m.substr(body_start, h.content_length)));
  }

  std::optional<WarcRecord> next_gzip() {
    while (true) {
      // Corrupt compressed data past the first member abandons the rest of
      // the file; everything already parsed stands.
      bool more;
      try {
        more = gz->next_member(member);
      } catch (const IoError&) {
        ++stats.stream_errors;
        return std::nullopt;
      }
      if (!more) return std::nullopt;
      ++stats.members;
      record_offset = gz->member_offset();
      if (auto rec = record_from_member(member)) {
        ++stats.yielded;
        return rec;
      }
    }
  }

  std::optional<WarcRecord> next_plain() {
    std::string line;
    while (!plain->at_eof()) {
      // Skip inter-record blank lines, then expect a version line.
      std::uint64_t start = plain->offset();
      if (!plain->read_line(line)) return std::nullopt;
      std::string_view stripped = trim(line);
      if (stripped.empty()) continue;

      ++stats.members;
      record_offset = start;
      if (!stripped.starts_with("WARC/1.")) {
        ++stats.malformed;
        continue;  // resync at the next line
      }
      std::string header_block = line + "\n";
      while (plain->read_line(line)) {
        if (trim(line).empty()) break;
        header_block += line;
        header_block += "\n";
      }
      WarcHeader h;
      try {
        h = parse_record_header(header_block);
      } catch (const MalformedHeader&) {
        ++stats.malformed;
        continue;
      }
      std::string payload;
      if (plain->read_exact(payload, h.content_length) < h.content_length) {
        ++stats.truncated;
        return std::nullopt;  // EOF mid-payload
      }
      ++stats.yielded;
      return assemble(h, std::move(payload));
    }
    return std::nullopt;
  }

  static WarcRecord assemble(const WarcHeader& h, std::string payload) {
    WarcRecord rec;
    rec.type = h.type;
    rec.target_uri = h.target_uri;
    rec.date = h.date;
    rec.record_id = h.record_id;
    rec.content_length = h.content_length;
    rec.payload = std::move(payload);
    if (rec.type == WarcRecordType::response) {
      if (auto http = parse_http_response(rec.payload)) {
        rec.http_status = http->status;
        rec.http_content_type = http->content_type;
      }
    }
    return rec;
  }
};

WarcReader::WarcReader(std::istream& in) : impl_(std::make_unique<Impl>(in)) {}
WarcReader::~WarcReader() = default;

std::optional<WarcRecord> WarcReader::next() {
  switch (impl_->mode) {
    case Impl::Mode::empty: return std::nullopt;
    case Impl::Mode::gzip: return impl_->next_gzip();
    case Impl::Mode::plain: return impl_->next_plain();
  }
  return std::nullopt;
}

const WarcReadStats& WarcReader::stats() const { return impl_->stats; }
std::uint64_t WarcReader::record_offset() const { return impl_->record_offset; }

std::string_view to_string(ContentKind k) {
  return k == ContentKind::html ? "html" : "plain";
}

std::optional<ContentKind> content_kind_from_string(std::string_view s) {
  if (s == "html") return ContentKind::html;
  if (s == "plain") return ContentKind::plain;
  return std::nullopt;
}

const std::vector<std::string>& default_charset_fallbacks() {
  static const std::vector<std::string> kFallbacks = {"shift_jis", "euc-jp", "iso-2022-jp"};
  return kFallbacks;
}

DecodedText decode_charset(std::string_view payload, const std::optional<std::string>& declared,
                           const std::vector<std::string>& fallbacks) {
  std::vector<std::string> attempts;
  if (declared) {
    if (auto canon = canonical_charset(*declared)) attempts.push_back(*canon);
  }
  auto push_unique = [&](const std::string& cs) {
    if (std::find(attempts.begin(), attempts.end(), cs) == attempts.end()) attempts.push_back(cs);
  };
  push_unique("utf-8");
  for (const auto& f : fallbacks) {
    if (auto canon = canonical_charset(f)) push_unique(*canon);
  }

  for (const auto& charset : attempts) {
    if (auto text = try_decode(payload, charset)) {
      // ASCII-only bytes are valid UTF-8; report them as the charset that
      // actually won so round-trips stay predictable.
      return DecodedText{std::move(*text), charset, false};
    }
  }
  return DecodedText{encode_utf8(decode_utf8(payload)), "utf-8", true};
}

std::string_view to_string(ExtractDrop d) {
  switch (d) {
    case ExtractDrop::kept: return "kept";
    case ExtractDrop::non_response: return "non-response";
    case ExtractDrop::non_200: return "non-200";
    case ExtractDrop::non_text: return "non-text";
    case ExtractDrop::decode_failure: return "decode-failure";
  }
  return "kept";
}

namespace {

struct MimeInfo {
  std::string type;  // lowercased type/subtype
  std::optional<std::string> charset;
};

MimeInfo parse_mime(std::string_view content_type) {
  MimeInfo out;
  auto semi = content_type.find(';');
  out.type = ascii_lower(trim(content_type.substr(0, semi)));
  while (semi != std::string_view::npos) {
    auto start = semi + 1;
    semi = content_type.find(';', start);
    std::string_view param = trim(content_type.substr(
        start, semi == std::string_view::npos ? content_type.size() - start : semi - start));
    auto eq = param.find('=');
    if (eq == std::string_view::npos) continue;
    if (ascii_lower(trim(param.substr(0, eq))) == "charset") {
      out.charset = std::string(trim(param.substr(eq + 1)));
    }
  }
  return out;
}

}  // namespace

std::optional<RawDocument> extract_response_document(const WarcRecord& record, const DocId& id,
                                                     const std::vector<std::string>& charset_fallbacks,
                                                     ExtractDrop& reason) {
  if (record.type != WarcRecordType::response) {
    reason = ExtractDrop::non_response;
    return std::nullopt;
  }
  if (!record.http_status || *record.http_status != 200) {
    reason = ExtractDrop::non_200;
    return std::nullopt;
  }
  if (!record.http_content_type) {
    reason = ExtractDrop::non_text;
    return std::nullopt;
  }
  MimeInfo mime = parse_mime(*record.http_content_type);
  ContentKind kind;
  if (mime.type == "text/html") {
    kind = ContentKind::html;
  } else if (mime.type == "text/plain") {
    kind = ContentKind::plain;
  } else {
    reason = ExtractDrop::non_text;
    return std::nullopt;
  }

  auto http = parse_http_response(record.payload);
  std::string_view body = http ? std::string_view(record.payload).substr(http->body_offset)
                               : std::string_view(record.payload);
  DecodedText decoded = decode_charset(body, mime.charset, charset_fallbacks);
  if (decoded.lossy) {
    reason = ExtractDrop::decode_failure;
    return std::nullopt;
  }

  RawDocument doc;
  doc.id = id;
  doc.url = record.target_uri;
  doc.fetch_time = record.date;
  doc.kind = kind;
  doc.charset = decoded.charset;
  doc.text = std::move(decoded.text);
  reason = ExtractDrop::kept;
  return doc;
}

LangScore score_japanese(std::string_view text) {
  LangScore out;
  std::uint64_t japanese = 0;
  std::u32string cps = decode_utf8(text);
  for (char32_t cp : cps) {
    if (!is_letter(cp)) continue;
    ++out.letter_count;
    if (is_japanese_letter(cp)) ++japanese;
  }
  out.score = out.letter_count == 0 ? 0.0 : double(japanese) / double(out.letter_count);
  return out;
}

}  // namespace corpusforge
