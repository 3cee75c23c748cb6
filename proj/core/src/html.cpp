#include "corpusforge/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

#include "corpusforge/unicode.hpp"

namespace corpusforge {

const std::string* HtmlNode::attr(std::string_view name) const {
  for (const auto& [k, v] : attrs) {
    if (k == name) return &v;
  }
  return nullptr;
}

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

// Named entities worth decoding in wild HTML; everything else stays literal.
std::string_view named_entity(std::string_view name) {
  if (name == "amp") return "&";
  if (name == "lt") return "<";
  if (name == "gt") return ">";
  if (name == "quot") return "\"";
  if (name == "apos") return "'";
  if (name == "nbsp") return " ";
  if (name == "copy") return "©";
  if (name == "middot") return "·";
  if (name == "hellip") return "…";
  if (name == "mdash") return "—";
  if (name == "ndash") return "–";
  if (name == "laquo") return "«";
  if (name == "raquo") return "»";
  if (name == "ldquo") return "“";
  if (name == "rdquo") return "”";
  if (name == "lsquo") return "‘";
  if (name == "rsquo") return "’";
  if (name == "trade") return "™";
  if (name == "reg") return "®";
  if (name == "yen") return "¥";
  return {};
}

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c != '&') {
      out.push_back(c);
      ++i;
      continue;
    }
    auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back(c);
      ++i;
      continue;
    }
    std::string_view body = s.substr(i + 1, semi - i - 1);
    if (!body.empty() && body[0] == '#') {
      std::uint32_t cp = 0;
      bool ok = false;
      if (body.size() > 1 && (body[1] == 'x' || body[1] == 'X')) {
        auto [ptr, ec] = std::from_chars(body.data() + 2, body.data() + body.size(), cp, 16);
        ok = ec == std::errc() && ptr == body.data() + body.size();
      } else {
        auto [ptr, ec] = std::from_chars(body.data() + 1, body.data() + body.size(), cp, 10);
        ok = ec == std::errc() && ptr == body.data() + body.size();
      }
      if (ok && cp > 0 && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF)) {
        append_utf8(static_cast<char32_t>(cp), out);
        i = semi + 1;
        continue;
      }
    } else if (auto rep = named_entity(body); !rep.empty()) {
      out.append(rep);
      i = semi + 1;
      continue;
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

bool is_void_element(std::string_view tag) {
  static constexpr std::array<std::string_view, 14> kVoid = {
      "area", "base", "br", "col", "embed", "hr", "img",
      "input", "link", "meta", "param", "source", "track", "wbr"};
  return std::find(kVoid.begin(), kVoid.end(), tag) != kVoid.end();
}

bool is_rawtext_element(std::string_view tag) {
  return tag == "script" || tag == "style";
}

// Start tag T implicitly closes an open element S in these cases.
bool implicitly_closes(std::string_view open, std::string_view incoming) {
  if (open == "p") {
    static constexpr std::array<std::string_view, 18> kClosers = {
        "p", "div", "section", "article", "ul", "ol", "li", "h1", "h2", "h3",
        "h4", "h5", "h6", "table", "pre", "blockquote", "dl", "form"};
    return std::find(kClosers.begin(), kClosers.end(), incoming) != kClosers.end();
  }
  if (open == "li") return incoming == "li";
  if (open == "dt" || open == "dd") return incoming == "dt" || incoming == "dd";
  if (open == "tr") return incoming == "tr" || incoming == "thead" || incoming == "tbody" || incoming == "tfoot";
  if (open == "td" || open == "th") {
    return incoming == "td" || incoming == "th" || incoming == "tr" || incoming == "thead" ||
           incoming == "tbody" || incoming == "tfoot";
  }
  if (open == "option") return incoming == "option" || incoming == "optgroup";
  if (open == "thead" || open == "tbody" || open == "tfoot") {
    return incoming == "thead" || incoming == "tbody" || incoming == "tfoot";
  }
  return false;
}

struct Attr {
  std::string name;
  std::string value;
};

class Parser {
 public:
  explicit Parser(std::string_view html) : in_(html) {}

  HtmlNode run() {
    HtmlNode root = HtmlNode::element("#root");
    stack_.push_back(&root);
    while (pos_ < in_.size()) {
      step();
    }
    flush_text();
    return root;
  }

 private:
  void step() {
    char c = in_[pos_];
    if (c != '<') {
      text_ += c;
      ++pos_;
      return;
    }
    // '<' — decide what construct starts here.
    if (pos_ + 1 >= in_.size()) {
      text_ += c;
      ++pos_;
      return;
    }
    char next = in_[pos_ + 1];
    if (next == '!') {
      flush_text();
      if (in_.compare(pos_, 4, "<!--") == 0) {
        auto end = in_.find("-->", pos_ + 4);
        pos_ = end == std::string_view::npos ? in_.size() : end + 3;
      } else {
        auto end = in_.find('>', pos_);
        pos_ = end == std::string_view::npos ? in_.size() : end + 1;
      }
      return;
    }
    if (next == '?') {
      flush_text();
      auto end = in_.find('>', pos_);
      pos_ = end == std::string_view::npos ? in_.size() : end + 1;
      return;
    }
    if (next == '/') {
      std::size_t p = pos_ + 2;
      std::string tag = read_tag_name(p);
      if (tag.empty()) {  // "</" with no name: literal text
        text_ += '<';
        ++pos_;
        return;
      }
      auto end = in_.find('>', p);
      pos_ = end == std::string_view::npos ? in_.size() : end + 1;
      flush_text();
      close_tag(tag);
      return;
    }
    if (!std::isalpha(static_cast<unsigned char>(next))) {
      text_ += '<';
      ++pos_;
      return;
    }

    std::size_t p = pos_ + 1;
    std::string tag = read_tag_name(p);
    bool self_closing = false;
    std::vector<Attr> attrs = read_attrs(p, self_closing);
    pos_ = p;
    flush_text();
    open_tag(tag, std::move(attrs), self_closing);
  }

  std::string read_tag_name(std::size_t& p) {
    std::size_t start = p;
    while (p < in_.size() && (std::isalnum(static_cast<unsigned char>(in_[p])) || in_[p] == '-' ||
                              in_[p] == '_' || in_[p] == ':')) {
      ++p;
    }
    return ascii_lower(in_.substr(start, p - start));
  }

  std::vector<Attr> read_attrs(std::size_t& p, bool& self_closing) {
    std::vector<Attr> attrs;
    self_closing = false;
    while (p < in_.size()) {
      while (p < in_.size() && is_space(in_[p])) ++p;
      if (p >= in_.size()) break;
      if (in_[p] == '>') {
        ++p;
        break;
      }
      if (in_[p] == '/') {
        ++p;
        if (p < in_.size() && in_[p] == '>') {
          self_closing = true;
          ++p;
          break;
        }
        continue;
      }
      // attribute name
      std::size_t start = p;
      while (p < in_.size() && !is_space(in_[p]) && in_[p] != '=' && in_[p] != '>' && in_[p] != '/') ++p;
      std::string name = ascii_lower(in_.substr(start, p - start));
      std::string value;
      while (p < in_.size() && is_space(in_[p])) ++p;
      if (p < in_.size() && in_[p] == '=') {
        ++p;
        while (p < in_.size() && is_space(in_[p])) ++p;
        if (p < in_.size() && (in_[p] == '"' || in_[p] == '\'')) {
          char quote = in_[p++];
          std::size_t vstart = p;
          while (p < in_.size() && in_[p] != quote) ++p;
          value = decode_entities(in_.substr(vstart, p - vstart));
          if (p < in_.size()) ++p;  // closing quote
        } else {
          std::size_t vstart = p;
          while (p < in_.size() && !is_space(in_[p]) && in_[p] != '>') ++p;
          value = decode_entities(in_.substr(vstart, p - vstart));
        }
      }
      if (!name.empty()) attrs.push_back({std::move(name), std::move(value)});
    }
    return attrs;
  }

  void open_tag(const std::string& tag, std::vector<Attr> attrs, bool self_closing) {
    while (stack_.size() > 1 && implicitly_closes(stack_.back()->tag, tag)) {
      stack_.pop_back();
    }
    HtmlNode node = HtmlNode::element(tag);
    for (auto& a : attrs) node.attrs.emplace_back(std::move(a.name), std::move(a.value));

    if (is_rawtext_element(tag) && !self_closing) {
      // Content runs verbatim to the matching end tag; no entity decoding.
      std::string raw = consume_rawtext(tag);
      if (!raw.empty()) node.children.push_back(HtmlNode::text_node(std::move(raw)));
      stack_.back()->children.push_back(std::move(node));
      return;
    }

    HtmlNode& placed = stack_.back()->children.emplace_back(std::move(node));
    if (!self_closing && !is_void_element(tag)) {
      stack_.push_back(&placed);
    }
  }

  std::string consume_rawtext(const std::string& tag) {
    std::size_t start = pos_;
    std::string close = "</" + tag;
    std::size_t p = pos_;
    while (p < in_.size()) {
      auto lt = in_.find('<', p);
      if (lt == std::string_view::npos) break;
      if (lt + close.size() <= in_.size() && iequals(in_.substr(lt, close.size()), close)) {
        std::string raw(in_.substr(start, lt - start));
        auto end = in_.find('>', lt);
        pos_ = end == std::string_view::npos ? in_.size() : end + 1;
        return raw;
      }
      p = lt + 1;
    }
    std::string raw(in_.substr(start));
    pos_ = in_.size();
    return raw;
  }

  void close_tag(const std::string& tag) {
    // Find the nearest matching open element; everything above it closes too.
    for (std::size_t i = stack_.size(); i-- > 1;) {
      if (stack_[i]->tag == tag) {
        stack_.resize(i);
        return;
      }
    }
    // No matching open tag: ignored.
  }

  void flush_text() {
    if (text_.empty()) return;
    stack_.back()->children.push_back(HtmlNode::text_node(decode_entities(text_)));
    text_.clear();
  }

  std::string_view in_;
  std::size_t pos_ = 0;
  std::string text_;
  std::vector<HtmlNode*> stack_;
};

}  // namespace

HtmlNode parse_html(std::string_view html) {
  return Parser(html).run();
}

}  // namespace corpusforge
