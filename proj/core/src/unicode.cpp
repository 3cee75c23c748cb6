#include "corpusforge/unicode.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/ucnv.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <cctype>
#include <memory>

#include "corpusforge/errors.hpp"

namespace corpusforge {

void append_utf8(char32_t cp, std::string& out) {
  if (cp <= 0x7F) {
    out.push_back(static_cast<char>(cp));
  } else if (cp <= 0x7FF) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp <= 0xFFFF) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

namespace {

// Decodes one scalar value starting at i. Returns U+FFFD and advances by one
// byte on malformed input (overlongs, surrogates, out of range included).
char32_t next_scalar(std::string_view s, std::size_t& i, bool& bad) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  bad = false;
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  auto cont = [&](std::size_t off) {
    return i + off < s.size() && (static_cast<unsigned char>(s[i + off]) & 0xC0) == 0x80;
  };
  auto fail = [&]() {
    bad = true;
    ++i;
    return char32_t{0xFFFD};
  };
  if ((b0 & 0xE0) == 0xC0) {
    if (!cont(1)) return fail();
    char32_t cp = (char32_t(b0 & 0x1F) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3F);
    if (cp < 0x80) return fail();
    i += 2;
    return cp;
  }
  if ((b0 & 0xF0) == 0xE0) {
    if (!cont(1) || !cont(2)) return fail();
    char32_t cp = (char32_t(b0 & 0x0F) << 12) |
                  (char32_t(static_cast<unsigned char>(s[i + 1]) & 0x3F) << 6) |
                  (static_cast<unsigned char>(s[i + 2]) & 0x3F);
    if (cp < 0x800 || (cp >= 0xD800 && cp <= 0xDFFF)) return fail();
    i += 3;
    return cp;
  }
  if ((b0 & 0xF8) == 0xF0) {
    if (!cont(1) || !cont(2) || !cont(3)) return fail();
    char32_t cp = (char32_t(b0 & 0x07) << 18) |
                  (char32_t(static_cast<unsigned char>(s[i + 1]) & 0x3F) << 12) |
                  (char32_t(static_cast<unsigned char>(s[i + 2]) & 0x3F) << 6) |
                  (static_cast<unsigned char>(s[i + 3]) & 0x3F);
    if (cp < 0x10000 || cp > 0x10FFFF) return fail();
    i += 4;
    return cp;
  }
  return fail();
}

}  // namespace

std::u32string decode_utf8(std::string_view bytes, bool* had_errors) {
  std::u32string out;
  out.reserve(bytes.size());
  bool any_bad = false;
  std::size_t i = 0;
  while (i < bytes.size()) {
    bool bad = false;
    out.push_back(next_scalar(bytes, i, bad));
    any_bad |= bad;
  }
  if (had_errors) *had_errors = any_bad;
  return out;
}

std::string encode_utf8(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size() * 3);
  for (char32_t cp : cps) append_utf8(cp, out);
  return out;
}

bool is_valid_utf8(std::string_view bytes) {
  std::size_t i = 0;
  while (i < bytes.size()) {
    bool bad = false;
    next_scalar(bytes, i, bad);
    if (bad) return false;
  }
  return true;
}

std::uint64_t count_scalars(std::string_view utf8) {
  std::uint64_t n = 0;
  std::size_t i = 0;
  while (i < utf8.size()) {
    bool bad = false;
    next_scalar(utf8, i, bad);
    ++n;
  }
  return n;
}

bool is_letter(char32_t cp) {
  return u_isalpha(static_cast<UChar32>(cp));
}

bool is_japanese_letter(char32_t cp) {
  if (!is_letter(cp)) return false;
  return (cp >= 0x3041 && cp <= 0x309F) ||    // hiragana
         (cp >= 0x30A0 && cp <= 0x30FF) ||    // katakana
         (cp >= 0x31F0 && cp <= 0x31FF) ||    // katakana phonetic extensions
         (cp >= 0xFF66 && cp <= 0xFF9F) ||    // halfwidth katakana
         (cp >= 0x4E00 && cp <= 0x9FFF) ||    // CJK unified ideographs
         (cp >= 0x3400 && cp <= 0x4DBF) ||    // extension A
         (cp >= 0x20000 && cp <= 0x2EBEF) ||  // extensions B..F
         (cp >= 0x30000 && cp <= 0x323AF);    // extensions G..H
}

std::string nfkc(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFKC instance unavailable");
  icu::UnicodeString in = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  icu::UnicodeString normalized = norm->normalize(in, status);
  if (U_FAILURE(status)) throw Error("NFKC normalization failed");
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

char32_t fold_case(char32_t cp) {
  return static_cast<char32_t>(u_foldCase(static_cast<UChar32>(cp), U_FOLD_CASE_DEFAULT));
}

std::string fold_for_shingles(std::string_view utf8) {
  std::u32string cps = decode_utf8(nfkc(utf8));
  std::string out;
  out.reserve(utf8.size());
  bool pending_space = false;
  bool emitted = false;
  for (char32_t cp : cps) {
    if (u_isUWhiteSpace(static_cast<UChar32>(cp))) {
      pending_space = emitted;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    append_utf8(fold_case(cp), out);
    emitted = true;
  }
  return out;
}

std::optional<std::string> canonical_charset(std::string_view label) {
  std::string k;
  k.reserve(label.size());
  for (char c : label) {
    if (c == ' ' || c == '\t' || c == '"' || c == '\'') continue;
    k.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (k == "utf-8" || k == "utf8") return "utf-8";
  if (k == "us-ascii" || k == "ascii") return "us-ascii";
  if (k == "shift_jis" || k == "shift-jis" || k == "shiftjis" || k == "sjis" || k == "x-sjis" ||
      k == "windows-31j" || k == "cp932" || k == "ms932") {
    return "shift_jis";
  }
  if (k == "euc-jp" || k == "eucjp" || k == "x-euc-jp") return "euc-jp";
  if (k == "iso-2022-jp" || k == "csiso2022jp") return "iso-2022-jp";
  if (k == "iso-8859-1" || k == "latin1" || k == "latin-1") return "iso-8859-1";
  return std::nullopt;
}

namespace {

const char* icu_converter_name(const std::string& charset) {
  if (charset == "shift_jis") return "shift_jis";
  if (charset == "euc-jp") return "euc-jp";
  if (charset == "iso-2022-jp") return "iso-2022-jp";
  if (charset == "iso-8859-1") return "iso-8859-1";
  return nullptr;
}

}  // namespace

std::optional<std::string> try_decode(std::string_view bytes, const std::string& charset) {
  if (charset == "utf-8") {
    if (!is_valid_utf8(bytes)) return std::nullopt;
    return std::string(bytes);
  }
  if (charset == "us-ascii") {
    for (unsigned char c : bytes) {
      if (c >= 0x80) return std::nullopt;
    }
    return std::string(bytes);
  }
  const char* conv_name = icu_converter_name(charset);
  if (!conv_name) return std::nullopt;

  UErrorCode status = U_ZERO_ERROR;
  UConverter* conv = ucnv_open(conv_name, &status);
  if (U_FAILURE(status) || !conv) return std::nullopt;
  std::unique_ptr<UConverter, decltype(&ucnv_close)> guard(conv, &ucnv_close);
  // Stop on the first invalid or unmappable sequence; the caller falls back
  // to the next candidate charset.
  ucnv_setToUCallBack(conv, UCNV_TO_U_CALLBACK_STOP, nullptr, nullptr, nullptr, &status);
  if (U_FAILURE(status)) return std::nullopt;

  icu::UnicodeString decoded(bytes.data(), static_cast<int32_t>(bytes.size()), conv, status);
  if (U_FAILURE(status)) return std::nullopt;
  std::string out;
  decoded.toUTF8String(out);
  return out;
}

std::optional<std::string> try_encode(std::string_view utf8, const std::string& charset) {
  if (charset == "utf-8") {
    if (!is_valid_utf8(utf8)) return std::nullopt;
    return std::string(utf8);
  }
  const char* conv_name = icu_converter_name(charset);
  if (!conv_name) return std::nullopt;

  UErrorCode status = U_ZERO_ERROR;
  UConverter* conv = ucnv_open(conv_name, &status);
  if (U_FAILURE(status) || !conv) return std::nullopt;
  std::unique_ptr<UConverter, decltype(&ucnv_close)> guard(conv, &ucnv_close);
  ucnv_setFromUCallBack(conv, UCNV_FROM_U_CALLBACK_STOP, nullptr, nullptr, nullptr, &status);
  if (U_FAILURE(status)) return std::nullopt;

  icu::UnicodeString text = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  std::string out;
  out.resize(static_cast<std::size_t>(text.length()) * 4 + 16);
  std::int32_t written = ucnv_fromUChars(conv, out.data(), static_cast<int32_t>(out.size()),
                                         text.getBuffer(), text.length(), &status);
  if (U_FAILURE(status)) return std::nullopt;
  out.resize(static_cast<std::size_t>(written));
  return out;
}

}  // namespace corpusforge
