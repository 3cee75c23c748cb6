#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace corpusforge {

/// Element or text node of a parsed HTML tree. Element tags are lowercase.
struct HtmlNode {
  enum class Kind { element, text };
  Kind kind = Kind::element;
  std::string tag;  // elements; "#root" for the synthetic document root
  std::vector<std::pair<std::string, std::string>> attrs;
  std::string text;  // text nodes
  std::vector<HtmlNode> children;

  static HtmlNode element(std::string tag_name) {
    HtmlNode n;
    n.kind = Kind::element;
    n.tag = std::move(tag_name);
    return n;
  }
  static HtmlNode text_node(std::string content) {
    HtmlNode n;
    n.kind = Kind::text;
    n.text = std::move(content);
    return n;
  }

  const std::string* attr(std::string_view name) const;
};

/// Error-tolerant HTML parse: unclosed tags close at their parent boundary,
/// unknown tags become generic elements, comments and doctype are dropped.
/// Never throws, whatever the input bytes.
HtmlNode parse_html(std::string_view html);

}  // namespace corpusforge
