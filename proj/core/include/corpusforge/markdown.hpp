#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "corpusforge/doc_id.hpp"
#include "corpusforge/html.hpp"
#include "corpusforge/warc.hpp"

namespace corpusforge {

/// Canonical pipeline record: a converted, language-scored document.
struct Document {
  DocId id;
  std::string url;
  std::string markdown;
  double lang_score = 0.0;
  std::uint64_t char_count = 0;  // Unicode scalar values in markdown
  std::uint64_t line_count = 0;  // LF-separated lines
};

/// Renders an HTML tree to Markdown with a fixed conversion table:
/// h1..h6 headings, paragraph blocks for p/div/section, "-" / "1." list
/// items (ordered lists renumbered), links for http(s) hrefs, bold/italic,
/// fenced blocks for pre/code, pipe tables, and hard line breaks for br.
/// script/style/nav/header/footer/aside/form/iframe/noscript subtrees and
/// images are dropped. Blank-line runs collapse to one, trailing whitespace
/// is stripped per line, and the output ends with exactly one LF.
std::string render_markdown(const HtmlNode& root);

/// Plain-text cleanup: CRLF/CR to LF, control characters other than LF/TAB
/// removed, NFKC applied, runs of 3+ blank lines collapsed to one.
std::string normalize_plain(std::string_view text);

/// Applies NFKC outside fenced code blocks; fence interiors stay
/// byte-faithful.
std::string nfkc_outside_fences(std::string_view markdown);

std::uint64_t count_lines(std::string_view text);

/// Converts an extracted document to its canonical form. Returns nullopt
/// when conversion leaves only whitespace (the document is dropped).
std::optional<Document> to_document(const RawDocument& raw, const LangScore& lang);

}  // namespace corpusforge
