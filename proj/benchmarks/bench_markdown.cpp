#include <benchmark/benchmark.h>

#include "corpusforge/markdown.hpp"
#include "support/fixtures.hpp"

using namespace corpusforge;

namespace {

std::string sample_page(int paragraphs) {
  testsupport::JapaneseTextGen gen(21);
  std::vector<std::string> parts;
  for (int p = 0; p < paragraphs; ++p) parts.push_back(gen.document(1, 80));
  return testsupport::html_page(gen.sentence(10), parts);
}

void BM_ParseHtml(benchmark::State& state) {
  std::string page = sample_page(int(state.range(0)));
  for (auto _ : state) {
    auto tree = parse_html(page);
    benchmark::DoNotOptimize(&tree);
  }
  state.SetBytesProcessed(int64_t(state.iterations()) * int64_t(page.size()));
}
BENCHMARK(BM_ParseHtml)->Arg(10)->Arg(100);

void BM_RenderMarkdown(benchmark::State& state) {
  std::string page = sample_page(int(state.range(0)));
  HtmlNode tree = parse_html(page);
  for (auto _ : state) {
    std::string md = render_markdown(tree);
    benchmark::DoNotOptimize(md.data());
  }
  state.SetBytesProcessed(int64_t(state.iterations()) * int64_t(page.size()));
}
BENCHMARK(BM_RenderMarkdown)->Arg(10)->Arg(100);

void BM_NormalizePlain(benchmark::State& state) {
  testsupport::JapaneseTextGen gen(23);
  std::string text;
  for (int i = 0; i < state.range(0); ++i) text += gen.sentence(70) + "\r\n\r\n\r\n";
  for (auto _ : state) {
    std::string out = normalize_plain(text);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetBytesProcessed(int64_t(state.iterations()) * int64_t(text.size()));
}
BENCHMARK(BM_NormalizePlain)->Arg(100);

}  // namespace
