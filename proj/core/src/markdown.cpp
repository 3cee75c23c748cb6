#include "corpusforge/markdown.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "corpusforge/unicode.hpp"

namespace corpusforge {

namespace {

bool is_stripped_element(std::string_view tag) {
  static constexpr std::array<std::string_view, 9> kStrip = {
      "script", "style", "nav", "header", "footer", "aside", "form", "iframe", "noscript"};
  return std::find(kStrip.begin(), kStrip.end(), tag) != kStrip.end();
}

int heading_level(std::string_view tag) {
  if (tag.size() == 2 && tag[0] == 'h' && tag[1] >= '1' && tag[1] <= '6') return tag[1] - '0';
  return 0;
}

bool is_paragraph_element(std::string_view tag) {
  return tag == "p" || tag == "div" || tag == "section";
}

bool is_ws(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

std::string collapse_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_run = false;
  for (char c : s) {
    if (is_ws(c)) {
      in_run = true;
      continue;
    }
    if (in_run && !out.empty()) out.push_back(' ');
    in_run = false;
    out.push_back(c);
  }
  return out;
}

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && is_ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_ws(s.back())) s.remove_suffix(1);
  return s;
}

// Plain text of a subtree (strip set removed, whitespace collapsed); used
// for link labels, emphasis, headings and table cells.
void inline_text_of(const HtmlNode& node, std::string& out);

std::string inline_text(const HtmlNode& node) {
  std::string out;
  inline_text_of(node, out);
  return std::string(trim_view(out));
}

void append_word_spaced(std::string& out, std::string_view piece, bool space_before) {
  if (piece.empty()) return;
  if (space_before && !out.empty() && out.back() != ' ' && out.back() != '\n') out.push_back(' ');
  out.append(piece);
}

void inline_text_of(const HtmlNode& node, std::string& out) {
  if (node.kind == HtmlNode::Kind::text) {
    bool leading = !node.text.empty() && is_ws(node.text.front());
    append_word_spaced(out, collapse_ws(node.text), leading);
    return;
  }
  if (is_stripped_element(node.tag) || node.tag == "img") return;
  for (const auto& child : node.children) inline_text_of(child, out);
  if (node.tag == "br") out.push_back(' ');
}

class Renderer {
 public:
  std::string run(const HtmlNode& root) {
    render_children(root);
    flush_paragraph();
    return assemble();
  }

 private:
  // --- block assembly ---------------------------------------------------

  void flush_paragraph() {
    std::string_view body = trim_view(para_);
    if (!body.empty()) {
      std::size_t pos = 0;
      while (pos <= body.size()) {
        auto nl = body.find('\n', pos);
        std::string_view line = body.substr(pos, nl == std::string_view::npos ? body.size() - pos : nl - pos);
        lines_.emplace_back(trim_view(line));
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
      }
      lines_.emplace_back();
    }
    para_.clear();
  }

  void emit_line(std::string line) {
    lines_.push_back(std::move(line));
  }

  void end_block() {
    lines_.emplace_back();
  }

  std::string assemble() const {
    std::string out;
    bool pending_blank = false;
    for (const auto& raw : lines_) {
      std::string_view line = raw;
      while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
      if (line.empty()) {
        pending_blank = !out.empty();
        continue;
      }
      if (pending_blank) out.push_back('\n');
      pending_blank = false;
      out.append(line);
      out.push_back('\n');
    }
    return out;
  }

  // --- inline content ---------------------------------------------------

  void append_inline(std::string_view piece, bool space_before) {
    append_word_spaced(para_, piece, space_before);
  }

  void render_inline(const HtmlNode& node) {
    switch (node.kind) {
      case HtmlNode::Kind::text: {
        bool leading = !node.text.empty() && is_ws(node.text.front());
        append_inline(collapse_ws(node.text), leading);
        return;
      }
      case HtmlNode::Kind::element: break;
    }
    const std::string& tag = node.tag;
    if (is_stripped_element(tag) || tag == "img") return;
    if (tag == "br") {
      para_ += '\n';
      return;
    }
    if (tag == "strong" || tag == "b") {
      std::string body = inline_text(node);
      if (!body.empty()) append_inline("**" + body + "**", true);
      return;
    }
    if (tag == "em" || tag == "i") {
      std::string body = inline_text(node);
      if (!body.empty()) append_inline("*" + body + "*", true);
      return;
    }
    if (tag == "a") {
      std::string body = inline_text(node);
      if (body.empty()) return;
      const std::string* href = node.attr("href");
      bool linkable = false;
      if (href) {
        std::string scheme;
        for (char c : *href) {
          if (c == ':') break;
          scheme.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
        linkable = scheme == "http" || scheme == "https";
      }
      if (linkable) {
        append_inline("[" + body + "](" + *href + ")", true);
      } else {
        append_inline(body, true);
      }
      return;
    }
    // Block-level constructs nested in inline flow still render as blocks.
    if (renders_as_block(node)) {
      render_block(node);
      return;
    }
    render_children(node);
  }

  // --- block content ----------------------------------------------------

  bool renders_as_block(const HtmlNode& node) const {
    if (node.kind != HtmlNode::Kind::element) return false;
    const std::string& tag = node.tag;
    return heading_level(tag) > 0 || is_paragraph_element(tag) || tag == "ul" || tag == "ol" ||
           tag == "pre" || tag == "code" || tag == "table" || tag == "blockquote";
  }

  void render_block(const HtmlNode& node) {
    const std::string& tag = node.tag;
    if (int level = heading_level(tag); level > 0) {
      std::string body = inline_text(node);
      flush_paragraph();
      if (!body.empty()) {
        emit_line(std::string(static_cast<std::size_t>(level), '#') + " " + body);
        end_block();
      }
      return;
    }
    if (is_paragraph_element(tag) || tag == "blockquote") {
      flush_paragraph();
      render_children(node);
      flush_paragraph();
      return;
    }
    if (tag == "ul" || tag == "ol") {
      flush_paragraph();
      render_list(node, tag == "ol", 0);
      end_block();
      return;
    }
    if (tag == "pre" || tag == "code") {
      flush_paragraph();
      render_code_block(node);
      return;
    }
    if (tag == "table") {
      flush_paragraph();
      render_table(node);
      return;
    }
  }

  void render_children(const HtmlNode& node) {
    for (const auto& child : node.children) {
      if (child.kind == HtmlNode::Kind::element && renders_as_block(child)) {
        render_block(child);
      } else {
        render_inline(child);
      }
    }
  }

  void render_list(const HtmlNode& list, bool ordered, int depth) {
    int index = 0;
    std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    for (const auto& child : list.children) {
      if (child.kind != HtmlNode::Kind::element || child.tag != "li") continue;
      ++index;
      std::string marker = ordered ? std::to_string(index) + ". " : "- ";
      std::string body;
      std::vector<const HtmlNode*> nested;
      for (const auto& part : child.children) {
        if (part.kind == HtmlNode::Kind::element && (part.tag == "ul" || part.tag == "ol")) {
          nested.push_back(&part);
        } else {
          inline_text_of(part, body);
        }
      }
      emit_line(indent + marker + std::string(trim_view(body)));
      for (const HtmlNode* sub : nested) {
        render_list(*sub, sub->tag == "ol", depth + 1);
      }
    }
  }

  // Raw text of a subtree with whitespace preserved (code content).
  static void raw_text_of(const HtmlNode& node, std::string& out) {
    if (node.kind == HtmlNode::Kind::text) {
      out += node.text;
      return;
    }
    if (is_stripped_element(node.tag)) return;
    for (const auto& child : node.children) raw_text_of(child, out);
  }

  void render_code_block(const HtmlNode& node) {
    std::string body;
    raw_text_of(node, body);
    // Trim a single leading/trailing newline; interior bytes stay intact.
    if (!body.empty() && body.front() == '\n') body.erase(0, 1);
    while (!body.empty() && (body.back() == '\n' || body.back() == ' ')) body.pop_back();
    if (body.empty()) return;
    emit_line("```");
    std::size_t pos = 0;
    while (pos <= body.size()) {
      auto nl = body.find('\n', pos);
      if (nl == std::string_view::npos) {
        code_line(body.substr(pos));
        break;
      }
      code_line(body.substr(pos, nl - pos));
      pos = nl + 1;
    }
    emit_line("```");
    end_block();
  }

  void code_line(std::string line) {
    // A code line that is only whitespace must survive blank-line collapsing;
    // keep fence interiors non-empty with the line as-is but strip CR.
    while (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      lines_.push_back(" ");  // placeholder inside fences, never collapsed
    } else {
      lines_.push_back(std::move(line));
    }
  }

  void render_table(const HtmlNode& table) {
    std::vector<std::vector<std::string>> rows;
    collect_rows(table, rows);
    if (rows.empty()) return;
    std::size_t cols = 0;
    for (const auto& r : rows) cols = std::max(cols, r.size());
    if (cols == 0) return;

    auto format_row = [cols](const std::vector<std::string>& cells) {
      std::string line = "|";
      for (std::size_t i = 0; i < cols; ++i) {
        line += " ";
        line += i < cells.size() ? cells[i] : "";
        line += " |";
      }
      return line;
    };
    emit_line(format_row(rows[0]));
    std::string sep = "|";
    for (std::size_t i = 0; i < cols; ++i) sep += " --- |";
    emit_line(sep);
    for (std::size_t i = 1; i < rows.size(); ++i) emit_line(format_row(rows[i]));
    end_block();
  }

  void collect_rows(const HtmlNode& node, std::vector<std::vector<std::string>>& rows) {
    for (const auto& child : node.children) {
      if (child.kind != HtmlNode::Kind::element) continue;
      if (child.tag == "tr") {
        std::vector<std::string> cells;
        for (const auto& cell : child.children) {
          if (cell.kind == HtmlNode::Kind::element && (cell.tag == "td" || cell.tag == "th")) {
            std::string body = inline_text(cell);
            // Pipes inside cells would break the row structure.
            std::string safe;
            for (char c : body) {
              if (c == '|') safe += "\\|";
              else safe += c;
            }
            cells.push_back(std::move(safe));
          }
        }
        rows.push_back(std::move(cells));
      } else if (child.tag == "thead" || child.tag == "tbody" || child.tag == "tfoot") {
        collect_rows(child, rows);
      }
    }
  }

  std::vector<std::string> lines_;
  std::string para_;
};

}  // namespace

std::string render_markdown(const HtmlNode& root) {
  return Renderer().run(root);
}

std::string normalize_plain(std::string_view text) {
  // Line endings and control characters first.
  std::string cleaned;
  cleaned.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') continue;  // CRLF -> LF
      cleaned.push_back('\n');
      continue;
    }
    if (static_cast<unsigned char>(c) < 0x20 && c != '\n' && c != '\t') continue;
    if (c == '\x7f') continue;
    cleaned.push_back(c);
  }

  cleaned = nfkc(cleaned);

  // Runs of 3+ blank lines collapse to a single blank line.
  bool trailing_lf = !cleaned.empty() && cleaned.back() == '\n';
  std::vector<std::string_view> lines;
  {
    std::string_view rest = cleaned;
    if (trailing_lf) rest.remove_suffix(1);
    std::size_t pos = 0;
    while (pos <= rest.size() && !rest.empty()) {
      auto nl = rest.find('\n', pos);
      if (nl == std::string_view::npos) {
        lines.push_back(rest.substr(pos));
        break;
      }
      lines.push_back(rest.substr(pos, nl - pos));
      pos = nl + 1;
    }
  }

  std::string out;
  out.reserve(cleaned.size());
  std::size_t i = 0;
  bool first = true;
  auto emit = [&](std::string_view line) {
    if (!first) out.push_back('\n');
    out.append(line);
    first = false;
  };
  while (i < lines.size()) {
    if (!lines[i].empty()) {
      emit(lines[i]);
      ++i;
      continue;
    }
    std::size_t run = 0;
    while (i + run < lines.size() && lines[i + run].empty()) ++run;
    std::size_t keep = run >= 3 ? 1 : run;
    for (std::size_t k = 0; k < keep; ++k) emit({});
    i += run;
  }
  if (trailing_lf && !out.empty()) out.push_back('\n');
  return out;
}

std::string nfkc_outside_fences(std::string_view markdown) {
  std::string out;
  out.reserve(markdown.size());
  bool in_fence = false;
  std::size_t pos = 0;
  while (pos <= markdown.size()) {
    auto nl = markdown.find('\n', pos);
    bool last = nl == std::string_view::npos;
    std::string_view line = markdown.substr(pos, last ? markdown.size() - pos : nl - pos);
    if (last && line.empty()) break;
    if (line.starts_with("```")) {
      in_fence = !in_fence;
      out.append(line);
    } else if (in_fence) {
      out.append(line);
    } else {
      out += nfkc(line);
    }
    if (!last) out.push_back('\n');
    if (last) break;
    pos = nl + 1;
  }
  return out;
}

std::uint64_t count_lines(std::string_view text) {
  if (text.empty()) return 0;
  std::uint64_t n = 0;
  for (char c : text) {
    if (c == '\n') ++n;
  }
  if (text.back() != '\n') ++n;
  return n;
}

std::optional<Document> to_document(const RawDocument& raw, const LangScore& lang) {
  std::string markdown;
  if (raw.kind == ContentKind::html) {
    markdown = nfkc_outside_fences(render_markdown(parse_html(raw.text)));
  } else {
    markdown = normalize_plain(raw.text);
  }
  if (trim_view(markdown).empty()) return std::nullopt;

  Document doc;
  doc.id = raw.id;
  doc.url = raw.url;
  doc.lang_score = lang.score;
  doc.char_count = count_scalars(markdown);
  doc.line_count = count_lines(markdown);
  doc.markdown = std::move(markdown);
  return doc;
}

}  // namespace corpusforge
