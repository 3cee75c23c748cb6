#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace corpusforge {

/// Appends the UTF-8 encoding of one scalar value.
void append_utf8(char32_t cp, std::string& out);

/// Decodes UTF-8, substituting U+FFFD for invalid sequences.
/// had_errors, when given, reports whether any substitution happened.
std::u32string decode_utf8(std::string_view bytes, bool* had_errors = nullptr);

std::string encode_utf8(std::u32string_view cps);

bool is_valid_utf8(std::string_view bytes);

/// Number of Unicode scalar values (invalid bytes count as one each).
std::uint64_t count_scalars(std::string_view utf8);

/// Unicode general category L*.
bool is_letter(char32_t cp);

/// Letter in the hiragana, katakana (incl. phonetic extensions and
/// halfwidth forms), or CJK unified ideograph ranges.
bool is_japanese_letter(char32_t cp);

/// NFKC normalization (ICU). Unifies full-width ASCII, composes halfwidth
/// katakana, and so on.
std::string nfkc(std::string_view utf8);

/// Simple case folding of a single scalar value.
char32_t fold_case(char32_t cp);

/// Canonical form used for shingling: NFKC, whitespace runs collapsed to a
/// single space, letters case-folded, leading/trailing space trimmed.
std::string fold_for_shingles(std::string_view utf8);

/// Strict single-charset decode to UTF-8. charset is a canonical label
/// ("utf-8", "shift_jis", "euc-jp", "iso-2022-jp", ...). Returns nullopt if
/// any byte sequence is invalid in that charset.
std::optional<std::string> try_decode(std::string_view bytes, const std::string& charset);

/// Strict encode of UTF-8 text into the named charset; nullopt when some
/// scalar value has no representation there.
std::optional<std::string> try_encode(std::string_view utf8, const std::string& charset);

/// Maps a declared charset label to its canonical form, or nullopt when the
/// label is unknown.
std::optional<std::string> canonical_charset(std::string_view label);

}  // namespace corpusforge
