#include <doctest.h>

#include <algorithm>

#include "corpusforge/errors.hpp"
#include "corpusforge/quality.hpp"
#include "support/fixtures.hpp"

using namespace corpusforge;
using namespace testsupport;

namespace {

Document doc_of(std::string markdown) {
  Document d;
  d.id = DocId{"t", 0, 0};
  d.markdown = std::move(markdown);
  d.char_count = count_scalars(d.markdown);
  d.line_count = count_lines(d.markdown);
  return d;
}

std::string varied_hiragana(std::size_t n) {
  static const char32_t kHira[] = U"あいうえおかきくけこさしすせそたちつてとなにぬねの";
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    corpusforge::append_utf8(kHira[i % (std::size(kHira) - 1)], out);
  }
  return out;
}

}  // namespace

TEST_CASE("metrics of the empty document are all zero") {
  FilterMetrics m = compute_metrics(doc_of(""), {});
  CHECK(m.char_count == 0);
  CHECK(m.ja_char_ratio == doctest::Approx(0.0));
  CHECK(m.mean_line_length == doctest::Approx(0.0));
  CHECK(m.duplicate_line_ratio == doctest::Approx(0.0));
  CHECK(m.max_char_run == 0);
  CHECK(m.ngword_hits == 0);
}

TEST_CASE("duplicate line ratio counts repeats of earlier lines") {
  FilterMetrics m = compute_metrics(doc_of("あ\nあ\nい\n"), {});
  CHECK(m.duplicate_line_ratio == doctest::Approx(1.0 / 3.0));

  FilterMetrics none = compute_metrics(doc_of("あ\nい\nう\n"), {});
  CHECK(none.duplicate_line_ratio == doctest::Approx(0.0));

  // blank lines are not counted at all
  FilterMetrics blanks = compute_metrics(doc_of("あ\n\n\nあ\n"), {});
  CHECK(blanks.duplicate_line_ratio == doctest::Approx(0.5));
}

TEST_CASE("single-line all-hiragana metrics") {
  FilterMetrics m = compute_metrics(doc_of(varied_hiragana(1000)), {});
  CHECK(m.char_count == 1000);
  CHECK(m.ja_char_ratio == doctest::Approx(1.0));
  CHECK(m.mean_line_length == doctest::Approx(1000.0));
  // evaluated against every default threshold by hand: all pass
  FilterVerdict v = evaluate_document(m, FilterConfig{});
  CHECK(v.passed);
  CHECK(v.failed_rules.empty());
}

TEST_CASE("max char run and ngword hits") {
  FilterMetrics m = compute_metrics(doc_of("ああああいいう"), {});
  CHECK(m.max_char_run == 4);

  FilterMetrics ng = compute_metrics(doc_of("悪い言葉と悪い言葉"), {"悪い言葉"});
  CHECK(ng.ngword_hits == 2);

  FilterMetrics clean = compute_metrics(doc_of("普通の文章"), {"悪い言葉"});
  CHECK(clean.ngword_hits == 0);
}

TEST_CASE("mean line length is over non-empty lines") {
  FilterMetrics m = compute_metrics(doc_of("あいう\n\nあいうえお\n"), {});
  CHECK(m.mean_line_length == doctest::Approx(4.0));
}

TEST_CASE("evaluate_document flags rules in fixed order") {
  FilterMetrics m;
  m.char_count = 100;  // < 400
  FilterVerdict v = evaluate_document(m, FilterConfig{});
  CHECK_FALSE(v.passed);
  REQUIRE_FALSE(v.failed_rules.empty());
  CHECK(v.failed_rules.front() == "min_chars");
  CHECK(std::find(v.failed_rules.begin(), v.failed_rules.end(), "min_chars") !=
        v.failed_rules.end());

  FilterMetrics dup;
  dup.char_count = 1000;
  dup.ja_char_ratio = 1.0;
  dup.mean_line_length = 50;
  dup.duplicate_line_ratio = 0.6;
  FilterVerdict vdup = evaluate_document(dup, FilterConfig{});
  CHECK_FALSE(vdup.passed);
  CHECK(vdup.failed_rules == std::vector<std::string>{"max_duplicate_line_ratio"});

  FilterMetrics many;
  many.char_count = 300000;  // > max
  many.ja_char_ratio = 0.1;
  many.mean_line_length = 2;
  many.duplicate_line_ratio = 0.9;
  many.max_char_run = 99;
  many.ngword_hits = 3;
  FilterVerdict vmany = evaluate_document(many, FilterConfig{});
  CHECK(vmany.failed_rules == std::vector<std::string>{"max_chars", "min_ja_ratio",
                                                       "min_mean_line_length",
                                                       "max_duplicate_line_ratio", "max_char_run",
                                                       "ngword"});
}

TEST_CASE("clean synthetic japanese prose passes; ascii lorem fails") {
  JapaneseTextGen gen(31337);
  FilterConfig config;
  int passed = 0;
  for (int i = 0; i < 100; ++i) {
    Document d = doc_of(gen.document(8, 60));
    passed += evaluate_document(compute_metrics(d, config.ngwords), config).passed;
  }
  CHECK(passed == 100);

  std::string lorem =
      "lorem ipsum dolor sit amet consectetur adipiscing elit sed do eiusmod tempor "
      "incididunt ut labore et dolore magna aliqua ut enim ad minim veniam quis nostrud";
  std::string body;
  for (int i = 0; i < 5; ++i) body += lorem + "\n";
  FilterVerdict v = evaluate_document(compute_metrics(doc_of(body), config.ngwords), config);
  CHECK_FALSE(v.passed);
  CHECK(std::find(v.failed_rules.begin(), v.failed_rules.end(), "min_ja_ratio") !=
        v.failed_rules.end());
}

TEST_CASE("monotonicity: loosening one threshold never fails a passing doc") {
  SplitMix64 rng(2024);
  JapaneseTextGen gen(17);
  for (int trial = 0; trial < 1000; ++trial) {
    // random doc: sometimes messy
    std::string body = gen.document(1 + rng.below(8), 10 + rng.below(60));
    if (rng.below(4) == 0) body += "\nlatin tail " + std::string(rng.below(30), 'x');
    if (rng.below(5) == 0) body += "\n" + body.substr(0, body.find('\n'));
    Document d = doc_of(body);

    FilterConfig config;
    config.min_chars = rng.below(800);
    config.max_chars = config.min_chars + 100 + rng.below(300000);
    config.min_ja_ratio = double(rng.below(100)) / 100.0;
    config.min_mean_line_length = double(rng.below(60));
    config.max_duplicate_line_ratio = double(rng.below(100)) / 100.0;
    config.max_char_run = 1 + rng.below(100);
    if (rng.below(3) == 0) config.ngwords = {"悪"};

    FilterMetrics m = compute_metrics(d, config.ngwords);
    bool before = evaluate_document(m, config).passed;

    FilterConfig loosened = config;
    switch (rng.below(7)) {
      case 0: loosened.min_chars = loosened.min_chars / 2; break;
      case 1: loosened.max_chars += 1000; break;
      case 2: loosened.min_ja_ratio = std::max(0.0, loosened.min_ja_ratio - 0.2); break;
      case 3: loosened.min_mean_line_length = std::max(0.0, loosened.min_mean_line_length - 5); break;
      case 4: loosened.max_duplicate_line_ratio = std::min(1.0, loosened.max_duplicate_line_ratio + 0.2); break;
      case 5: loosened.max_char_run += 50; break;
      default: loosened.ngwords.clear(); break;
    }
    FilterMetrics m2 = compute_metrics(d, loosened.ngwords);
    bool after = evaluate_document(m2, loosened).passed;
    if (before) CHECK(after);
  }
}

TEST_CASE("load_filter_config applies defaults and rejects unknown keys") {
  TempDir tmp("filtercfg");
  auto path = tmp.path() / "filter.conf";
  write_file(path, "min_chars = 200\n");
  FilterConfig c = load_filter_config(path);
  CHECK(c.min_chars == 200);
  CHECK(c.max_chars == 200000);
  CHECK(c.min_ja_ratio == doctest::Approx(0.5));
  CHECK(c.ngwords.empty());

  write_file(path, "min_chars = 200\nfoo = 1\n");
  try {
    load_filter_config(path);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "foo");
  }

  write_file(path, "min_chars = 500\nmax_chars = 100\n");
  CHECK_THROWS_AS(load_filter_config(path), ConfigError);
}

TEST_CASE("ngword file loads one word per line") {
  TempDir tmp("ngwords");
  auto words_path = tmp.path() / "ng.txt";
  write_file(words_path, "悪い言葉\nspam\n\n");
  auto cfg_path = tmp.path() / "filter.conf";
  write_file(cfg_path, "ngword_file = ng.txt\n");
  FilterConfig c = load_filter_config(cfg_path);
  CHECK(c.ngwords == std::vector<std::string>{"悪い言葉", "spam"});
}
