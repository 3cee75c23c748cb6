#include <doctest.h>

#include <regex>

#include "corpusforge/html.hpp"
#include "corpusforge/markdown.hpp"
#include "corpusforge/unicode.hpp"
#include "support/fixtures.hpp"

using namespace corpusforge;
using namespace testsupport;

namespace {

std::string md(const std::string& html) {
  return render_markdown(parse_html(html));
}

const HtmlNode* first_element(const HtmlNode& root) {
  for (const auto& c : root.children) {
    if (c.kind == HtmlNode::Kind::element) return &c;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("parse_html auto-closes sibling paragraphs") {
  // Matches the reference tolerant parse: two sibling <p> elements.
  HtmlNode root = parse_html("<p>a<p>b");
  std::vector<std::string> tags;
  std::vector<std::string> texts;
  for (const auto& c : root.children) {
    if (c.kind == HtmlNode::Kind::element) {
      tags.push_back(c.tag);
      texts.push_back(c.children.empty() ? "" : c.children.front().text);
    }
  }
  CHECK(tags == std::vector<std::string>{"p", "p"});
  CHECK(texts == std::vector<std::string>{"a", "b"});
}

TEST_CASE("parse_html on empty input gives an empty root") {
  HtmlNode root = parse_html("");
  CHECK(root.tag == "#root");
  CHECK(root.children.empty());
}

TEST_CASE("script content is kept in the tree; stripping happens at render") {
  HtmlNode root = parse_html("<div><script>x</script>hi</div>");
  const HtmlNode* div = first_element(root);
  REQUIRE(div != nullptr);
  CHECK(div->tag == "div");
  REQUIRE(div->children.size() == 2);
  CHECK(div->children[0].tag == "script");
  REQUIRE(div->children[0].children.size() == 1);
  CHECK(div->children[0].children[0].text == "x");
  CHECK(div->children[1].text == "hi");
}

TEST_CASE("parse_html lowercases tags and keeps unknown elements") {
  HtmlNode root = parse_html("<DIV><MyTag attr='1'>x</MyTag></DIV>");
  const HtmlNode* div = first_element(root);
  REQUIRE(div != nullptr);
  CHECK(div->tag == "div");
  REQUIRE_FALSE(div->children.empty());
  CHECK(div->children[0].tag == "mytag");
}

TEST_CASE("parse_html drops comments and doctype") {
  HtmlNode root = parse_html("<!DOCTYPE html><!-- note --><p>x</p>");
  int elements = 0;
  for (const auto& c : root.children) elements += c.kind == HtmlNode::Kind::element;
  CHECK(elements == 1);
}

TEST_CASE("parse_html decodes entities in text and attributes") {
  HtmlNode root = parse_html("<a href=\"http://e.jp/?a=1&amp;b=2\">x &lt; y &#x3042;</a>");
  const HtmlNode* a = first_element(root);
  REQUIRE(a != nullptr);
  const std::string* href = a->attr("href");
  REQUIRE(href != nullptr);
  CHECK(*href == "http://e.jp/?a=1&b=2");
  CHECK(a->children.front().text == "x < y あ");
}

// --- render_markdown decision table -----------------------------------------

TEST_CASE("headings and paragraphs") {
  CHECK(md("<h1>見出し</h1><p>本文</p>") == "# 見出し\n\n本文\n");
  CHECK(md("<h3>t</h3>") == "### t\n");
  CHECK(md("<p>a</p><p>b</p>") == "a\n\nb\n");
  CHECK(md("<div>a</div><section>b</section>") == "a\n\nb\n");
}

TEST_CASE("lists") {
  CHECK(md("<ul><li>a</li><li>b</li></ul>") == "- a\n- b\n");
  CHECK(md("<ol><li>x</li><li>y</li></ol>") == "1. x\n2. y\n");
  // ordered lists renumber from 1 regardless of source attributes
  CHECK(md("<ol start='5'><li>x</li><li>y</li></ol>") == "1. x\n2. y\n");
}

TEST_CASE("links render only for http(s) hrefs") {
  CHECK(md("<a href='http://e.jp/'>リンク</a>") == "[リンク](http://e.jp/)\n");
  CHECK(md("<a href='https://e.jp/'>s</a>") == "[s](https://e.jp/)\n");
  CHECK(md("<a href='javascript:x()'>bad</a>") == "bad\n");
  CHECK(md("<a href='mailto:a@b'>mail</a>") == "mail\n");
  CHECK(md("<a>no href</a>") == "no href\n");
}

TEST_CASE("emphasis") {
  CHECK(md("<p><strong>太字</strong></p>") == "**太字**\n");
  CHECK(md("<p><b>b</b> and <i>i</i></p>") == "**b** and *i*\n");
  CHECK(md("<p><em>em</em></p>") == "*em*\n");
}

TEST_CASE("code blocks are fenced") {
  CHECK(md("<pre>int x = 1;\nint y = 2;</pre>") == "```\nint x = 1;\nint y = 2;\n```\n");
  CHECK(md("<code>f(x)</code>") == "```\nf(x)\n```\n");
}

TEST_CASE("tables become pipe tables with a header row") {
  CHECK(md("<table><tr><th>a</th><th>b</th></tr><tr><td>1</td><td>2</td></tr></table>") ==
        "| a | b |\n| --- | --- |\n| 1 | 2 |\n");
  CHECK(md("<table><thead><tr><th>h</th></tr></thead><tbody><tr><td>v</td></tr></tbody></table>") ==
        "| h |\n| --- |\n| v |\n");
}

TEST_CASE("br breaks the line inside a paragraph") {
  CHECK(md("<p>一行目<br>二行目</p>") == "一行目\n二行目\n");
}

TEST_CASE("images are dropped entirely") {
  CHECK(md("<p>before <img src='x.png' alt='alt text'> after</p>") == "before after\n");
}

TEST_CASE("strip set removes whole subtrees") {
  CHECK(md("<nav>menu</nav><p>x</p>") == "x\n");
  CHECK(md("<header>h</header><footer>f</footer><aside>a</aside><p>body</p>") == "body\n");
  CHECK(md("<p>keep</p><script>alert(1)</script><style>p{}</style>") == "keep\n");
  CHECK(md("<form><input name='q'>query</form><p>x</p>") == "x\n");
  CHECK(md("<iframe src='x'>inner</iframe><noscript>ns</noscript><p>x</p>") == "x\n");
}

TEST_CASE("whitespace policy: collapsed blanks, stripped trailing space, single final LF") {
  std::string out = md("<p>a</p><div></div><p>b</p>");
  CHECK(out == "a\n\nb\n");
  CHECK(md("<p>  spaced   out  </p>") == "spaced out\n");
  std::string multi = md("<p>a</p><p></p><p></p><p>b</p>");
  CHECK(multi.find("\n\n\n") == std::string::npos);
  CHECK(multi.back() == '\n');
  CHECK(multi[multi.size() - 2] != '\n');
}

TEST_CASE("nested lists indent") {
  CHECK(md("<ul><li>a<ul><li>b</li></ul></li><li>c</li></ul>") == "- a\n  - b\n- c\n");
}

TEST_CASE("text-only trees render their concatenated text") {
  CHECK(md("plain text only") == "plain text only\n");
  CHECK(md("日本語の  テキスト") == "日本語の テキスト\n");
}

// --- strip-set property over generated HTML ---------------------------------

namespace {

std::string random_html(SplitMix64& rng, JapaneseTextGen& gen) {
  static const char* kTags[] = {"p", "div", "span", "h2", "ul", "nav", "script",
                                "style", "footer", "em", "strong", "table"};
  std::string out;
  int parts = 3 + int(rng.below(6));
  for (int i = 0; i < parts; ++i) {
    const char* tag = kTags[rng.below(std::size(kTags))];
    std::string body = gen.sentence(5 + rng.below(30));
    if (std::string(tag) == "ul") {
      out += "<ul><li>" + body + "</li><li>x</li></ul>";
    } else if (std::string(tag) == "table") {
      out += "<table><tr><td>" + body + "</td></tr></table>";
    } else {
      out += "<" + std::string(tag) + ">" + body + "</" + std::string(tag) + ">";
    }
  }
  return out;
}

}  // namespace

TEST_CASE("no strip-set tag survives as an HTML tag in rendered output") {
  std::regex strip_tag("<\\s*/?\\s*(script|style|nav|header|footer|aside|form|iframe|noscript)\\b",
                       std::regex::icase);
  SplitMix64 rng(1234);
  JapaneseTextGen gen(99);
  for (int i = 0; i < 300; ++i) {
    std::string out = md(random_html(rng, gen));
    CHECK_FALSE(std::regex_search(out, strip_tag));
  }
}

TEST_CASE("parse_html never throws on byte-mutated fixtures") {
  SplitMix64 rng(4321);
  JapaneseTextGen gen(5);
  int survived = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string doc = random_html(rng, gen);
    // mutate a handful of bytes, truncate, or splice
    int mutations = 1 + int(rng.below(5));
    for (int m = 0; m < mutations && !doc.empty(); ++m) {
      std::size_t at = rng.below(doc.size());
      switch (rng.below(3)) {
        case 0: doc[at] = char(rng.below(256)); break;
        case 1: doc.erase(at, rng.below(doc.size() - at) % 16); break;
        default: doc.insert(at, "<"); break;
      }
    }
    render_markdown(parse_html(doc));  // must not throw
    ++survived;
  }
  CHECK(survived == 10000);
}

// --- normalize_plain ---------------------------------------------------------

TEST_CASE("normalize_plain fixes line endings, width, controls, and blank runs") {
  CHECK(normalize_plain("a\r\nb") == "a\nb");
  CHECK(normalize_plain("Ａ") == "A");
  CHECK(normalize_plain("a\n\n\n\nb") == "a\n\nb");
  CHECK(normalize_plain("a\rb") == "a\nb");
  CHECK(normalize_plain("a\x01\x02 b\x7f") == "a b");
  CHECK(normalize_plain("tab\tkept") == "tab\tkept");
  CHECK(normalize_plain("a\n\nb") == "a\n\nb");  // short runs stay
}

TEST_CASE("normalize_plain is idempotent") {
  SplitMix64 rng(77);
  JapaneseTextGen gen(42);
  for (int i = 0; i < 200; ++i) {
    std::string s;
    int lines = int(rng.below(8));
    for (int l = 0; l < lines; ++l) {
      if (rng.below(3) == 0) {
        int blanks = int(rng.below(5));
        for (int b = 0; b < blanks; ++b) s += "\n";
      }
      s += gen.sentence(rng.below(30));
      s += rng.below(2) ? "\r\n" : "\n";
    }
    std::string once = normalize_plain(s);
    CHECK(normalize_plain(once) == once);
  }
}

// --- to_document -------------------------------------------------------------

TEST_CASE("to_document html path") {
  RawDocument raw;
  raw.id = DocId{"d", 0, 0};
  raw.url = "http://example.jp/";
  raw.kind = ContentKind::html;
  raw.text = "<p>こんにちは</p>";
  auto doc = to_document(raw, LangScore{1.0, 5});
  REQUIRE(doc.has_value());
  CHECK(doc->markdown == "こんにちは\n");
  CHECK(doc->char_count == 6);
  CHECK(doc->line_count == 1);
  CHECK(doc->lang_score == doctest::Approx(1.0));
}

TEST_CASE("to_document drops documents that convert to nothing") {
  RawDocument raw;
  raw.kind = ContentKind::html;
  raw.text = "<script>x</script>";
  CHECK_FALSE(to_document(raw, {}).has_value());
  raw.text = "<nav>only chrome</nav>";
  CHECK_FALSE(to_document(raw, {}).has_value());
  raw.kind = ContentKind::plain;
  raw.text = "";
  CHECK_FALSE(to_document(raw, {}).has_value());
}

TEST_CASE("to_document plain path normalizes") {
  RawDocument raw;
  raw.kind = ContentKind::plain;
  raw.text = "テスト\r\nＡ";
  auto doc = to_document(raw, LangScore{0.9, 3});
  REQUIRE(doc.has_value());
  CHECK(doc->markdown == "テスト\nA");
  CHECK(doc->char_count == 5);
  CHECK(doc->line_count == 2);
}

TEST_CASE("width folding applies outside code fences only") {
  RawDocument raw;
  raw.kind = ContentKind::html;
  raw.text = "<p>Ａ</p><pre>Ｂ</pre>";
  auto doc = to_document(raw, {});
  REQUIRE(doc.has_value());
  CHECK(doc->markdown == "A\n\n```\nＢ\n```\n");
}

TEST_CASE("count_lines counts LF-separated lines") {
  CHECK(count_lines("") == 0);
  CHECK(count_lines("a\n") == 1);
  CHECK(count_lines("a\nb") == 2);
  CHECK(count_lines("a\nb\n") == 2);
}
