#include <doctest.h>

#include <sstream>

#include "corpusforge/doc_id.hpp"
#include "corpusforge/errors.hpp"
#include "corpusforge/gzip.hpp"
#include "corpusforge/hashing.hpp"
#include "corpusforge/jsonl.hpp"
#include "corpusforge/kv_config.hpp"
#include "corpusforge/unicode.hpp"
#include "support/fixtures.hpp"

using namespace corpusforge;

TEST_CASE("doc id formats and parses round-trip") {
  DocId id{"2017-04", 3, 127};
  CHECK(id.str() == "2017-04/3/127");
  auto back = DocId::parse("2017-04/3/127");
  REQUIRE(back.has_value());
  CHECK(*back == id);

  // dump labels containing '/' split at the last two separators
  auto nested = DocId::parse("cc/2020-05/12/9");
  REQUIRE(nested.has_value());
  CHECK(nested->dump == "cc/2020-05");
  CHECK(nested->file == 12);
  CHECK(nested->record == 9);

  CHECK_FALSE(DocId::parse("no-separators").has_value());
  CHECK_FALSE(DocId::parse("a/b/c").has_value());
}

TEST_CASE("doc id ordering is the lexicographic triple order") {
  CHECK(DocId{"2017A", 0, 5} < DocId{"2019B", 0, 1});
  CHECK(DocId{"a", 1, 0} < DocId{"a", 2, 0});
  CHECK(DocId{"a", 1, 3} < DocId{"a", 1, 4});
}

TEST_CASE("kv config parses, types, and rejects unknown keys") {
  KvConfig kv = KvConfig::parse("a = 1\n# comment\nb.c = hello # trailing\nflag = true\nr = 0.5\n");
  CHECK(kv.get_int("a", 0) == 1);
  CHECK(kv.get_string("b.c", "") == "hello");
  CHECK(kv.get_bool("flag", false));
  CHECK(kv.get_double("r", 0) == doctest::Approx(0.5));
  CHECK(kv.get_int("absent", 7) == 7);
  CHECK_THROWS_AS((void)kv.get_int("b.c", 0), ConfigError);
  CHECK_THROWS_AS(KvConfig::parse("a = 1\na = 2\n"), ConfigError);

  KvConfig strict = KvConfig::parse("known = 1\nmystery = 2\n");
  (void)strict.get_int("known", 0);
  CHECK_THROWS_AS(strict.reject_unknown_keys(), ConfigError);
}

TEST_CASE("canonical config text is sorted and stable") {
  KvConfig a = KvConfig::parse("b = 2\na = 1\n");
  KvConfig b = KvConfig::parse("a = 1\nb = 2\n");
  CHECK(a.canonical_text() == b.canonical_text());
  CHECK(sha256_hex(a.canonical_text()) == sha256_hex(b.canonical_text()));
}

TEST_CASE("sha256 matches a known vector") {
  // echo -n abc | sha256sum
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("mix64 is bijective-ish on samples and splitmix below is in range") {
  SplitMix64 rng(42);
  for (int i = 0; i < 1000; ++i) {
    std::uint64_t v = rng.below(17);
    CHECK(v < 17);
  }
  CHECK(mix64(1) != mix64(2));
}

TEST_CASE("gzip round-trips single and multi member streams") {
  std::string a = "hello ";
  std::string b = "world";
  std::string stream = gzip_compress(a) + gzip_compress(b);
  CHECK(gzip_decompress(stream) == "hello world");

  std::istringstream in(stream);
  GzipMemberReader reader(in);
  std::string member;
  REQUIRE(reader.next_member(member));
  CHECK(member == a);
  CHECK(reader.member_offset() == 0);
  REQUIRE(reader.next_member(member));
  CHECK(member == b);
  CHECK(reader.member_offset() == gzip_compress(a).size());
  CHECK_FALSE(reader.next_member(member));
}

TEST_CASE("gzip compression is deterministic") {
  std::string payload = "the same bytes every time";
  CHECK(gzip_compress(payload) == gzip_compress(payload));
}

TEST_CASE("truncated gzip stream raises") {
  std::string full = gzip_compress("some reasonably long content to cut off mid-stream");
  std::string cut = full.substr(0, full.size() / 2);
  std::istringstream in(cut);
  GzipMemberReader reader(in);
  std::string member;
  CHECK_THROWS_AS(reader.next_member(member), IoError);
}

TEST_CASE("utf8 validation and decoding") {
  CHECK(is_valid_utf8("日本語 abc"));
  CHECK_FALSE(is_valid_utf8("\xff\xfe\xff"));
  CHECK_FALSE(is_valid_utf8("\xc0\xaf"));  // overlong
  CHECK_FALSE(is_valid_utf8("\xed\xa0\x80"));  // surrogate

  bool bad = false;
  auto cps = decode_utf8("a\xffz", &bad);
  CHECK(bad);
  REQUIRE(cps.size() == 3);
  CHECK(cps[1] == 0xFFFD);
  CHECK(count_scalars("日本語") == 3);
  CHECK(count_scalars("abc") == 3);
}

TEST_CASE("utf8 encode/decode round-trip on mixed text") {
  std::string s = "あAｱ1日\n";
  CHECK(encode_utf8(decode_utf8(s)) == s);
}

TEST_CASE("letter classification") {
  CHECK(is_letter(U'あ'));
  CHECK(is_letter(U'a'));
  CHECK(is_letter(U'日'));
  CHECK_FALSE(is_letter(U'。'));
  CHECK_FALSE(is_letter(U'1'));

  CHECK(is_japanese_letter(U'あ'));
  CHECK(is_japanese_letter(U'ア'));
  CHECK(is_japanese_letter(U'日'));
  CHECK(is_japanese_letter(U'ｱ'));  // halfwidth katakana
  CHECK_FALSE(is_japanese_letter(U'a'));
  CHECK_FALSE(is_japanese_letter(U'Ａ'));  // fullwidth latin is not Japanese script
}

TEST_CASE("nfkc unifies width variants") {
  CHECK(nfkc("Ａ") == "A");
  CHECK(nfkc("ｱ") == "ア");
  CHECK(nfkc("ﾊﾞ") == "バ");  // halfwidth + voiced mark composes
  CHECK(nfkc("日本語") == "日本語");
  CHECK(nfkc(" ") == " ");
}

TEST_CASE("fold_for_shingles collapses whitespace and case") {
  CHECK(fold_for_shingles("Hello   World") == "hello world");
  CHECK(fold_for_shingles("  ＡＢ  あ\n\nい ") == "ab あ い");
  CHECK(fold_for_shingles("") == "");
}

TEST_CASE("jsonl wire formats are byte-stable with fixed field order") {
  RawDocRecord raw;
  raw.doc.id = DocId{"2017-04", 1, 2};
  raw.doc.url = "http://example.jp/";
  raw.doc.fetch_time = *parse_rfc3339("2017-03-22T09:00:00Z");
  raw.doc.kind = ContentKind::html;
  raw.doc.charset = "utf-8";
  raw.doc.text = "<p>こんにちは</p>";
  raw.lang_score = 0.5;
  CHECK(to_jsonl(raw) ==
        "{\"doc_id\":\"2017-04/1/2\",\"url\":\"http://example.jp/\","
        "\"fetch_time\":\"2017-03-22T09:00:00Z\",\"content_kind\":\"html\","
        "\"charset\":\"utf-8\",\"lang_score\":0.5,\"text\":\"<p>こんにちは</p>\"}");
  RawDocRecord back = raw_doc_from_jsonl(to_jsonl(raw));
  CHECK(back.doc.id == raw.doc.id);
  CHECK(back.doc.text == raw.doc.text);
  CHECK(back.lang_score == raw.lang_score);

  Document doc;
  doc.id = DocId{"2017-04", 1, 2};
  doc.url = "http://example.jp/";
  doc.markdown = "こんにちは\n";
  doc.lang_score = 1.0;
  doc.char_count = 6;
  doc.line_count = 1;
  CHECK(to_jsonl(doc) ==
        "{\"doc_id\":\"2017-04/1/2\",\"url\":\"http://example.jp/\","
        "\"markdown\":\"こんにちは\\n\",\"lang_score\":1.0,\"char_count\":6,\"line_count\":1}");
  Document doc_back = document_from_jsonl(to_jsonl(doc));
  CHECK(doc_back.markdown == doc.markdown);
  CHECK(doc_back.char_count == 6);

  std::vector<DocId> cluster = {DocId{"2017A", 0, 5}, DocId{"2019B", 0, 1}};
  CHECK(cluster_to_jsonl(cluster) ==
        "{\"survivor\":\"2017A/0/5\",\"members\":[\"2017A/0/5\",\"2019B/0/1\"]}");
  CHECK(cluster_from_jsonl(cluster_to_jsonl(cluster)) == cluster);
}

TEST_CASE("charset decoding picks the first strict winner") {
  // 日本語 in the three legacy encodings (reference codec fixtures)
  std::string sjis = "\x93\xfa\x96\x7b\x8c\xea";
  std::string eucjp = "\xc6\xfc\xcb\xdc\xb8\xec";
  std::string iso2022 = "\x1b\x24\x42\x46\x7c\x4b\x5c\x38\x6c\x1b\x28\x42";

  auto utf8 = try_decode("日本語", "utf-8");
  REQUIRE(utf8.has_value());
  CHECK(*utf8 == "日本語");

  auto s = try_decode(sjis, "shift_jis");
  REQUIRE(s.has_value());
  CHECK(*s == "日本語");
  CHECK(try_decode(sjis, "utf-8") == std::nullopt);

  auto e = try_decode(eucjp, "euc-jp");
  REQUIRE(e.has_value());
  CHECK(*e == "日本語");

  auto i = try_decode(iso2022, "iso-2022-jp");
  REQUIRE(i.has_value());
  CHECK(*i == "日本語");

  CHECK(canonical_charset("Shift-JIS") == "shift_jis");
  CHECK(canonical_charset("UTF8") == "utf-8");
  CHECK(canonical_charset("x-unknown-charset") == std::nullopt);
}
